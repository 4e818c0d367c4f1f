//! Experiment plumbing: config files, Monte-Carlo sweeps, CSV output and the
//! grid-search oracle used to certify the alternating optimiser.

mod config;
mod experiment;
mod oracle;
mod output;

pub use config::{parse_config, parse_config_str, ExperimentSpec, ScenarioTemplate, Sweep};
pub use experiment::{
    run_experiment, run_trace, trial_channels, trial_seed, ExperimentRun, ResultRecord, TrialFailure,
    TrialSetup,
};
pub use oracle::{brute_force_oracle, compare_with_oracle, OracleRow};
pub use output::{emit_trace, read_csv, write_csv, write_failures, write_oracle_csv, CSV_HEADER};

use std::path::PathBuf;

use thiserror::Error;

use crate::channel::ChannelError;
use crate::numerics::NumericsError;
use crate::optimizer::OptimizerError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
