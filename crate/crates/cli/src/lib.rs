//! Experiment runner behind the `nufactor` binary.
//!
//! [`run`] does all the work and returns the finished report; the binary only
//! parses flags, sizes the thread pool and writes the CSV.

pub mod commands;
pub mod config;
pub mod report;

use std::fmt;

pub use config::{Command, ConfigError, DensityChoice, ExperimentConfig};
pub use report::Report;

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    Config(ConfigError),
    /// A module error that aborts `compare`, `minorant` or `sieve`.
    Fatal(nufactor_core::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Fatal(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<nufactor_core::Error> for RunError {
    fn from(e: nufactor_core::Error) -> Self {
        RunError::Fatal(e)
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Fatal(_) => 3,
        }
    }
}

/// Run the configured command on the current rayon pool.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    match cfg.command.expect("validated") {
        Command::Compare => commands::compare(cfg),
        Command::Minorant => commands::minorant(cfg),
        Command::Divisor => commands::divisor(cfg),
        Command::Density => commands::density(cfg),
        Command::Saddle => commands::saddle(cfg),
        Command::Sieve => commands::sieve(cfg),
    }
}

/// 0 for a clean report, 1 when some rows failed.
pub fn exit_code(report: &Report) -> i32 {
    if report.row_errors > 0 {
        1
    } else {
        0
    }
}
