use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input text.
    #[error("parse error: {0}")]
    Parse(String),

    /// Input parsed but violates a data invariant; the name identifies it.
    #[error("invariant violated [{invariant}]: {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("unsupported rank {rank}: {what} requires rank {required}")]
    UnsupportedRank {
        rank: usize,
        required: usize,
        what: &'static str,
    },

    /// An internal consistency check failed.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }

    pub fn rank2(rank: usize, what: &'static str) -> Self {
        Error::UnsupportedRank {
            rank,
            required: 2,
            what,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Invariant { .. } => 3,
            Error::UnsupportedRank { .. } => 4,
            Error::CheckFailed(_) => 5,
        }
    }
}
