use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cpmm_frontier::amm::Token;
use cpmm_frontier::backtest::{
    build_table, frontier_overlay, write_outcomes, write_overlay, BacktestVariant, FeeTier, OutcomeTable, OverlayGrid,
    PoolSeries, PoolType, DEFAULT_PERIODS, DEFAULT_WARMUP_DAYS,
};
use cpmm_frontier::ingest::{daily_snapshots, replay, PoolSnapshot};
use serde::Serialize;

use crate::io::{create_dir, fee_rate, read_event_file, read_snapshot_file, write_file, write_manifest};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolSource {
    /// Raw event log, replayed at the configured fee.
    Events(PathBuf),
    /// Daily snapshots written by `replay`.
    Snapshots(PathBuf),
}

impl PoolSource {
    pub fn path(&self) -> &Path {
        match self {
            PoolSource::Events(p) | PoolSource::Snapshots(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NativeArg {
    X,
    Y,
    None,
}

impl NativeArg {
    pub fn token(self) -> Option<Token> {
        match self {
            NativeArg::X => Some(Token::X),
            NativeArg::Y => Some(Token::Y),
            NativeArg::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolTypeArg {
    OpenMarket,
    Stable,
}

impl From<PoolTypeArg> for PoolType {
    fn from(t: PoolTypeArg) -> Self {
        match t {
            PoolTypeArg::OpenMarket => PoolType::OpenMarket,
            PoolTypeArg::Stable => PoolType::Stable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BacktestVariantArg {
    Symmetric,
    Asymmetric,
}

impl From<BacktestVariantArg> for BacktestVariant {
    fn from(v: BacktestVariantArg) -> Self {
        match v {
            BacktestVariantArg::Symmetric => BacktestVariant::Symmetric,
            BacktestVariantArg::Asymmetric => BacktestVariant::Asymmetric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolInput {
    pub source: PoolSource,
    pub pair: String,
    pub pool_type: PoolTypeArg,
    pub native: NativeArg,
}

impl PoolInput {
    /// Open-market pool without a native token, named after the file stem.
    pub fn new(source: PoolSource) -> Self {
        let pair = source.path().file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "pool".into());
        PoolInput { source, pair, pool_type: PoolTypeArg::OpenMarket, native: NativeArg::None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TierSpec {
    pub name: String,
    pub combined_fee_share: f64,
}

impl From<&FeeTier> for TierSpec {
    fn from(t: &FeeTier) -> Self {
        TierSpec { name: t.name().to_string(), combined_fee_share: t.combined_fee_share() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestConfig {
    pub pools: Vec<PoolInput>,
    pub rho: f64,
    /// Overrides the variant implied by each pool's native token.
    pub variant: Option<BacktestVariantArg>,
    pub periods: Vec<u32>,
    pub tiers: Vec<TierSpec>,
    /// Overlay curves, in percent of the entry x holdings.
    pub fee_steps: Vec<f64>,
    pub warmup_days: u32,
    pub overlay_extent: f64,
    pub overlay_samples: usize,
    pub out: PathBuf,
}

impl BacktestConfig {
    pub fn new(pools: Vec<PoolInput>, out: impl Into<PathBuf>) -> Self {
        let grid = OverlayGrid::default();
        BacktestConfig {
            pools,
            rho: 0.003,
            variant: None,
            periods: DEFAULT_PERIODS.to_vec(),
            tiers: FeeTier::standard().iter().map(TierSpec::from).collect(),
            fee_steps: default_fee_steps(),
            warmup_days: DEFAULT_WARMUP_DAYS,
            overlay_extent: grid.extent,
            overlay_samples: grid.samples,
            out: out.into(),
        }
    }

    fn validate(&self) -> Result<Vec<FeeTier>, CliError> {
        if self.pools.is_empty() {
            return Err(CliError::Config("no input pools (use --events or --snapshots)".into()));
        }
        if self.periods.is_empty() || self.periods.contains(&0) {
            return Err(CliError::Config("--periods must list positive day counts".into()));
        }
        if self.tiers.is_empty() {
            return Err(CliError::Config("--tiers must not be empty".into()));
        }
        if let Some(s) = self.fee_steps.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(CliError::Config(format!("--fee-steps must be non-negative, got {s}")));
        }
        if !(self.overlay_extent.is_finite() && self.overlay_extent > 1.0) || self.overlay_samples < 2 {
            return Err(CliError::Config("overlay extent must exceed 1 and samples must be at least 2".into()));
        }
        self.tiers
            .iter()
            .map(|t| FeeTier::new(t.name.clone(), t.combined_fee_share).map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }
}

/// 0, 5, ..., 50 percent.
pub fn default_fee_steps() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i * 5)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub table: OutcomeTable,
    pub warnings: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

impl fmt::Display for BacktestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.table.rows {
            let defined = row.cells.iter().filter(|c| c.is_some()).count();
            writeln!(
                f,
                "{} ({}, {}): N={}, {defined}/{} cells defined",
                row.pair,
                row.variant,
                row.pool_type,
                row.n,
                row.cells.len()
            )?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for p in &self.outputs {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

fn slug(pair: &str) -> String {
    pair.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}

fn load(input: &PoolInput, rho: f64) -> Result<Vec<PoolSnapshot>, CliError> {
    match &input.source {
        PoolSource::Events(path) => {
            let events = read_event_file(path)?;
            let points = replay(&events, fee_rate(rho)?).map_err(|e| CliError::ingest(path, e))?;
            Ok(daily_snapshots(&points))
        }
        PoolSource::Snapshots(path) => read_snapshot_file(path),
    }
}

/// Builds the outcome table, per-pool outcomes and frontier overlays.
pub fn cmd_backtest(config: &BacktestConfig) -> Result<BacktestReport, CliError> {
    let tiers = config.validate()?;
    fee_rate(config.rho)?;

    let pools = config
        .pools
        .iter()
        .map(|input| {
            let series = PoolSeries::new(
                input.pair.clone(),
                input.pool_type.into(),
                input.native.token(),
                load(input, config.rho)?,
            );
            Ok(match config.variant {
                Some(v) => series.with_variant(v.into()),
                None => series,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let table = build_table(&pools, &config.periods, &tiers, config.warmup_days)?;
    let mut warnings = Vec::new();
    for row in &table.rows {
        let missing = row.cells.iter().filter(|c| c.is_none()).count();
        if missing > 0 {
            let w = format!(
                "{}: {missing} of {} cells have no observations (history too short for the period)",
                row.pair,
                row.cells.len()
            );
            log::warn!("{w}");
            warnings.push(w);
        }
    }

    create_dir(&config.out)?;
    let mut outputs = vec![write_file(&config.out, "table.csv", |w| table.write_csv(w))?];

    for (i, pool) in pools.iter().enumerate() {
        let mut outcomes = Vec::new();
        for &period in &config.periods {
            outcomes.extend(pool.oriented_outcomes(period, config.warmup_days)?);
        }
        let name = if pools.len() == 1 {
            "outcomes.csv".to_string()
        } else {
            format!("outcomes_{i}_{}.csv", slug(&pool.pair))
        };
        outputs.push(write_file(&config.out, &name, |w| write_outcomes(w, &outcomes))?);
    }

    let grid = OverlayGrid { extent: config.overlay_extent, samples: config.overlay_samples };
    let variants: BTreeSet<&str> = pools.iter().map(|p| variant_key(p.variant)).collect();
    for variant in [BacktestVariant::Symmetric, BacktestVariant::Asymmetric] {
        if !variants.contains(variant_key(variant)) {
            continue;
        }
        let curves = frontier_overlay(1.0, 1.0, variant, &config.fee_steps, grid)?;
        let name = if variants.len() == 1 {
            "frontier_overlay.csv".to_string()
        } else {
            format!("frontier_overlay_{}.csv", variant_key(variant))
        };
        outputs.push(write_file(&config.out, &name, |w| write_overlay(w, &curves))?);
    }

    outputs.push(write_manifest(&config.out, "backtest", config, &outputs)?);
    Ok(BacktestReport { table, warnings, outputs })
}

fn variant_key(v: BacktestVariant) -> &'static str {
    match v {
        BacktestVariant::Symmetric => "symmetric",
        BacktestVariant::Asymmetric => "asymmetric",
    }
}
