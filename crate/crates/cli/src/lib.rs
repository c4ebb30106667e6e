//! Library surface of the experiment runner: argument parsing, experiment
//! dispatch, and deterministic report emission. The binary in `main.rs` is
//! a thin shell around [`parse_cli`], [`run_experiment`] and
//! [`write_report`].

pub mod config;
pub mod experiments;
pub mod report;

use thiserror::Error;

pub use config::{parse_cli, RunConfig, EXPERIMENTS};
pub use experiments::run_experiment;
pub use report::{write_report, ExperimentReport, ReportBuilder, Series};

/// Runner errors, split by exit code: usage/validation -> 2, runtime/IO -> 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => 2,
            CliError::Clap(e) => match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            },
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<hyperheat_core::Error> for CliError {
    fn from(e: hyperheat_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
