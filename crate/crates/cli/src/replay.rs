use std::fmt;
use std::path::PathBuf;

use cpmm_frontier::ingest::{daily_snapshots, replay, write_snapshots, PoolSnapshot};
use serde::Serialize;

use crate::io::{create_dir, fee_rate, read_event_file, write_file, write_manifest};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayConfig {
    pub events: PathBuf,
    /// Pool trading fee, e.g. 0.003.
    pub rho: f64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub events: usize,
    pub snapshots: Vec<PoolSnapshot>,
    pub outputs: Vec<PathBuf>,
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "events: {}", self.events)?;
        writeln!(f, "snapshots: {}", self.snapshots.len())?;
        if let (Some(first), Some(last)) = (self.snapshots.first(), self.snapshots.last()) {
            writeln!(f, "range: {} .. {}", first.date, last.date)?;
            writeln!(f, "final reserves: {} {}", last.reserve_x, last.reserve_y)?;
        }
        for p in &self.outputs {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

/// Replays an event log and writes daily snapshots plus a manifest.
pub fn cmd_replay(config: &ReplayConfig) -> Result<ReplayReport, CliError> {
    let fee = fee_rate(config.rho)?;
    let events = read_event_file(&config.events)?;
    let points = replay(&events, fee).map_err(|e| CliError::ingest(&config.events, e))?;
    let snapshots = daily_snapshots(&points);
    if snapshots.is_empty() {
        log::warn!("{}: no snapshots produced", config.events.display());
    }

    create_dir(&config.out)?;
    let mut outputs = vec![write_file(&config.out, "snapshots.csv", |w| write_snapshots(w, &snapshots))?];
    outputs.push(write_manifest(&config.out, "replay", config, &outputs)?);
    Ok(ReplayReport { events: events.len(), snapshots, outputs })
}
