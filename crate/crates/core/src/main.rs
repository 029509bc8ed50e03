use clap::{Args, Parser, Subcommand, ValueEnum};
use parchern::cli::{self, Format, Outcome};
use parchern::minimize::SearchConfig;
use parchern::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "parchern",
    version,
    about = "Exact parabolic Chern invariants on blown-up surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Machine,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    file: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Global invariants of the bundle and of its extension to the blow-up.
    Delta(Common),
    /// Both sides of the decomposition with the per-point local terms.
    Decompose(Common),
    /// Rank-2 search for the extension minimizing the local invariant.
    Minimize {
        #[command(flatten)]
        common: Common,
        /// Only this multiple point.
        #[arg(long)]
        point: Option<String>,
        /// Largest mu allowed at the end of a chain; bounds g as well.
        #[arg(long)]
        cap: Option<i64>,
        /// Enumerate every candidate up to the cap.
        #[arg(long)]
        no_prune: bool,
    },
    /// Runs the invariant suite on the scenario.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cmd: &Command) -> Result<(Outcome, Format), Error> {
    let common = match cmd {
        Command::Delta(c) | Command::Decompose(c) => c,
        Command::Minimize { common, .. } | Command::Check { common, .. } => common,
    };
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| Error::Parse(format!("{}: {e}", common.file.display())))?;
    let (file, model) = cli::load(&text)?;
    let format = match common.format {
        FormatArg::Table => Format::Table,
        FormatArg::Machine => Format::Machine,
    };
    let out = match cmd {
        Command::Delta(_) => cli::cmd_delta(&file, &model)?,
        Command::Decompose(_) => cli::cmd_decompose(&file, &model)?,
        Command::Minimize {
            point,
            cap,
            no_prune,
            ..
        } => {
            let config = SearchConfig {
                cap: *cap,
                prune: !no_prune,
            };
            cli::cmd_minimize(&file, &model, point.as_deref(), &config)?
        }
        Command::Check { seed, .. } => cli::cmd_check(&file, &model, *seed)?,
    };
    Ok((out, format))
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(&args.command) {
        Ok((out, format)) => {
            print!("{}", cli::render(&out.report, format));
            if let Some(m) = &out.message {
                eprintln!("parchern: {m}");
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("parchern: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
