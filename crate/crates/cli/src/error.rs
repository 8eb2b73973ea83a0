use std::path::{Path, PathBuf};

use cpmm_frontier::backtest::BacktestError;
use cpmm_frontier::frontier::FrontierError;
use cpmm_frontier::ingest::IngestError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Malformed {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("{}: replay failed at {source}", path.display())]
    Replay {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error(transparent)]
    Backtest(#[from] BacktestError),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Frontier(_) => 1,
            CliError::Input { .. } => 2,
            CliError::Malformed { .. } => 3,
            CliError::Replay { .. } => 4,
            CliError::Backtest(BacktestError::Csv(_) | BacktestError::Io(_)) => 5,
            CliError::Backtest(_) => 1,
            CliError::Output { .. } => 5,
        }
    }

    pub(crate) fn ingest(path: &Path, err: IngestError) -> Self {
        let path = path.to_path_buf();
        match err {
            IngestError::Io(source) => CliError::Input { path, source },
            e @ IngestError::Replay { .. } => CliError::Replay { path, source: e },
            e => CliError::Malformed { path, source: e },
        }
    }

    pub(crate) fn output(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Output { path: path.to_path_buf(), source }
    }
}
