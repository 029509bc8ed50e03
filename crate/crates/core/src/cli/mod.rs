//! Scenario files, commands and report rendering for the `parchern` binary.

pub mod commands;
pub mod report;
pub mod scenario;

pub use commands::{cmd_check, cmd_decompose, cmd_delta, cmd_minimize, load, Outcome};
pub use report::{render, Format};
pub use scenario::ScenarioFile;
