use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use cpmm_frontier::amm::{FeeRate, TradingFee};
use cpmm_frontier::ingest::{parse_events, read_snapshots, PoolEvent, PoolSnapshot};
use serde::Serialize;

use crate::CliError;

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Input { path: path.to_path_buf(), source })
}

pub(crate) fn read_event_file(path: &Path) -> Result<Vec<PoolEvent>, CliError> {
    parse_events(open(path)?).map_err(|e| CliError::ingest(path, e))
}

pub(crate) fn read_snapshot_file(path: &Path) -> Result<Vec<PoolSnapshot>, CliError> {
    read_snapshots(open(path)?).map_err(|e| CliError::ingest(path, e))
}

/// Pool fee as an exact ppm rate.
pub(crate) fn fee_rate(rho: f64) -> Result<FeeRate, CliError> {
    let fee = TradingFee::new(rho).map_err(|e| CliError::Config(format!("--rho: {e}")))?;
    FeeRate::from_trading_fee(fee).map_err(|e| CliError::Config(format!("--rho: {e}")))
}

pub(crate) fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::output(dir))
}

/// Creates `dir/name`, runs `write` on it and flushes.
pub(crate) fn write_file<E>(
    dir: &Path,
    name: &str,
    write: impl FnOnce(&mut BufWriter<File>) -> Result<(), E>,
) -> Result<PathBuf, CliError>
where
    E: std::error::Error + Send + Sync + 'static,
{
    let path = dir.join(name);
    let file = File::create(&path).map_err(CliError::output(&path))?;
    let mut sink = BufWriter::new(file);
    write(&mut sink).map_err(|e| CliError::Output { path: path.clone(), source: std::io::Error::other(e) })?;
    sink.flush().map_err(CliError::output(&path))?;
    Ok(path)
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    outputs: Vec<String>,
}

/// Writes `manifest.json` echoing the resolved configuration.
pub(crate) fn write_manifest<C: Serialize>(
    dir: &Path,
    command: &str,
    config: &C,
    outputs: &[PathBuf],
) -> Result<PathBuf, CliError> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        outputs: outputs
            .iter()
            .map(|p| p.file_name().unwrap_or(p.as_os_str()).to_string_lossy().into_owned())
            .collect(),
    };
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(CliError::output(&path))?;
    Ok(path)
}
