//! Pool event logs: parsing, replay through the exact pool model, and daily
//! noon-UTC snapshots.

mod parse;
mod replay;
mod snapshot;

pub use parse::{parse_events, write_events, EventKind, PoolEvent, EVENT_HEADER};
pub use replay::{replay, ReplayPoint};
pub use snapshot::{daily_snapshots, read_snapshots, write_snapshots, PoolSnapshot, SNAPSHOT_HEADER};

use thiserror::Error;

use crate::amm::AmmError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: {message}")]
    Order { line: u64, message: String },
    #[error("event {index} (block {block}): {source}")]
    Replay {
        index: usize,
        block: u64,
        #[source]
        source: AmmError,
    },
}

impl IngestError {
    fn from_csv(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            other => IngestError::Parse { line, message: format!("{other:?}") },
        }
    }
}
