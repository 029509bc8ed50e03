//! Exact rational scalars.
//!
//! Every quantity in this crate is an arbitrary-precision rational. Values are
//! always kept in lowest terms by `num-rational`, so `Display` output is
//! canonical (`p/q`, or `p` when the denominator is one).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics on a zero denominator.
pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn half() -> Q {
    frac(1, 2)
}

pub fn quarter() -> Q {
    frac(1, 4)
}

/// Returns the value as an `i64` if it is an integer that fits.
pub fn to_i64(q: &Q) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn is_nonnegative(q: &Q) -> bool {
    !q.is_negative()
}

pub fn clamp(q: Q, lo: &Q, hi: &Q) -> Q {
    if &q < lo {
        lo.clone()
    } else if &q > hi {
        hi.clone()
    } else {
        q
    }
}

pub fn sum<'a, I: IntoIterator<Item = &'a Q>>(items: I) -> Q {
    items.into_iter().fold(Q::zero(), |acc, x| acc + x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}: {}", self.input, self.reason)
    }
}

impl std::error::Error for ParseRationalError {}

/// Parses `p`, `-p`, `p/q` or `-p/q` with decimal integers. Decimal points and
/// exponents are rejected so that no floating-point value can sneak in.
pub fn parse(s: &str) -> Result<Q, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.to_string(),
        reason,
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty"));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(err("floating-point notation is not accepted"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Q::new(num, den))
}

/// Canonical text form, lowest terms.
pub fn render(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
