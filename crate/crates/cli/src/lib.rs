//! Command-line front end for the `cpmm-frontier` library.

mod backtest;
mod classify;
mod error;
mod frontier;
mod io;
mod replay;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cpmm_frontier::backtest::{FeeTier, DEFAULT_WARMUP_DAYS};
use cpmm_frontier::frontier::DEFAULT_CASE_TOLERANCE;

pub use backtest::{
    cmd_backtest, default_fee_steps, BacktestConfig, BacktestReport, BacktestVariantArg, NativeArg, PoolInput,
    PoolSource, PoolTypeArg, TierSpec,
};
pub use classify::{cmd_classify, ClassifyConfig, ClassifyReport};
pub use error::CliError;
pub use frontier::{cmd_frontier, FrontierConfig, FrontierReport, VariantArg};
pub use replay::{cmd_replay, ReplayConfig, ReplayReport};

#[derive(Debug, Parser)]
#[command(
    name = "cpmm-frontier",
    version,
    about = "Constant-product pool replay, LP breakeven frontiers and backtests"
)]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay an event log into daily noon-UTC snapshots.
    Replay(ReplayArgs),
    /// Evaluate the breakeven frontier of an LP position.
    Frontier(FrontierArgs),
    /// Classify historical LP positions against the frontier.
    Backtest(BacktestArgs),
    /// Check a single position for profitability.
    Classify(ClassifyArgs),
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite non-negative number, got {s}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match non_negative(s)? {
        v if v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got {s}")),
    }
}

fn positive_days(s: &str) -> Result<u32, String> {
    match s.parse::<u32>().map_err(|e| format!("{e}"))? {
        0 => Err("periods must be positive".into()),
        v => Ok(v),
    }
}

fn tier(s: &str) -> Result<FeeTier, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Event CSV.
    #[arg(long)]
    pub events: PathBuf,
    /// Pool trading fee.
    #[arg(long, default_value_t = 0.003, value_parser = non_negative)]
    pub rho: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub y0: f64,
    /// Mint fee in x-token units at entry prices.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    pub mint_fee: f64,
    /// Burn fee in x-token units at entry prices.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    pub burn_fee: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::None)]
    pub variant: VariantArg,
    /// Exit x1 values to evaluate.
    #[arg(long, value_delimiter = ',', value_parser = positive)]
    pub x1: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Sampling window as a multiple of (x0, y0).
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    pub extent: f64,
    /// Directory for frontier.csv and manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    /// Event CSV of one pool; repeat for several pools.
    #[arg(long)]
    pub events: Vec<PathBuf>,
    /// Snapshot CSV of one pool; repeat for several pools.
    #[arg(long)]
    pub snapshots: Vec<PathBuf>,
    /// Pool trading fee used when replaying events.
    #[arg(long, default_value_t = 0.003, value_parser = non_negative)]
    pub rho: f64,
    /// Pair label, once for all pools or once per pool.
    #[arg(long)]
    pub pair: Vec<String>,
    /// Wrapped native token, once for all pools or once per pool.
    #[arg(long, value_enum)]
    pub native: Vec<NativeArg>,
    /// Pool type, once for all pools or once per pool.
    #[arg(long, value_enum)]
    pub pool_type: Vec<PoolTypeArg>,
    /// Force the fee variant for every pool.
    #[arg(long, value_enum)]
    pub variant: Option<BacktestVariantArg>,
    #[arg(long, value_delimiter = ',', default_value = "30,180,360", value_parser = positive_days)]
    pub periods: Vec<u32>,
    /// small, medium, large, NAME=SHARE or a bare share.
    #[arg(long, value_delimiter = ',', default_value = "small,medium,large", value_parser = tier)]
    pub tiers: Vec<FeeTier>,
    /// Overlay fee levels in percent.
    #[arg(long, value_delimiter = ',', value_parser = non_negative)]
    pub fee_steps: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_WARMUP_DAYS)]
    pub warmup_days: u32,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub y0: f64,
    #[arg(long, value_parser = positive)]
    pub x1: f64,
    #[arg(long, value_parser = positive)]
    pub y1: f64,
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    pub mint_fee: f64,
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    pub burn_fee: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::None)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = DEFAULT_CASE_TOLERANCE, value_parser = non_negative)]
    pub tolerance: f64,
}

/// Expands a per-pool option given once (applies to all) or once per pool.
fn per_pool<T: Clone>(flag: &str, values: &[T], pools: usize) -> Result<Vec<Option<T>>, CliError> {
    match values.len() {
        0 => Ok(vec![None; pools]),
        1 => Ok(vec![Some(values[0].clone()); pools]),
        n if n == pools => Ok(values.iter().cloned().map(Some).collect()),
        n => Err(CliError::Config(format!("{flag} given {n} times for {pools} pools"))),
    }
}

impl TryFrom<BacktestArgs> for BacktestConfig {
    type Error = CliError;

    fn try_from(a: BacktestArgs) -> Result<Self, CliError> {
        let sources: Vec<PoolSource> = a
            .events
            .into_iter()
            .map(PoolSource::Events)
            .chain(a.snapshots.into_iter().map(PoolSource::Snapshots))
            .collect();
        let n = sources.len();
        let pairs = per_pool("--pair", &a.pair, n)?;
        let natives = per_pool("--native", &a.native, n)?;
        let types = per_pool("--pool-type", &a.pool_type, n)?;
        let pools = sources
            .into_iter()
            .enumerate()
            .map(|(i, source)| {
                let mut p = PoolInput::new(source);
                if let Some(pair) = &pairs[i] {
                    p.pair = pair.clone();
                }
                p.native = natives[i].unwrap_or(p.native);
                p.pool_type = types[i].unwrap_or(p.pool_type);
                p
            })
            .collect();
        let mut config = BacktestConfig::new(pools, a.out);
        config.rho = a.rho;
        config.variant = a.variant;
        config.periods = a.periods;
        config.tiers = a.tiers.iter().map(TierSpec::from).collect();
        if let Some(steps) = a.fee_steps {
            config.fee_steps = steps;
        }
        config.warmup_days = a.warmup_days;
        Ok(config)
    }
}

fn emit(out: &mut dyn Write, report: &dyn std::fmt::Display) -> Result<(), CliError> {
    write!(out, "{report}").map_err(CliError::output(std::path::Path::new("<stdout>")))
}

/// Runs a parsed command, printing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Replay(a) => {
            let config = ReplayConfig { events: a.events, rho: a.rho, out: a.out };
            emit(out, &cmd_replay(&config)?)
        }
        Command::Frontier(a) => {
            let config = FrontierConfig {
                x0: a.x0,
                y0: a.y0,
                mint_fee: a.mint_fee,
                burn_fee: a.burn_fee,
                variant: a.variant,
                x1: a.x1,
                samples: a.samples,
                extent: a.extent,
                out: a.out,
            };
            emit(out, &cmd_frontier(&config)?)
        }
        Command::Backtest(a) => emit(out, &cmd_backtest(&BacktestConfig::try_from(a)?)?),
        Command::Classify(a) => {
            let config = ClassifyConfig {
                x0: a.x0,
                y0: a.y0,
                x1: a.x1,
                y1: a.y1,
                mint_fee: a.mint_fee,
                burn_fee: a.burn_fee,
                variant: a.variant,
                tolerance: a.tolerance,
            };
            emit(out, &cmd_classify(&config)?)
        }
    }
}
