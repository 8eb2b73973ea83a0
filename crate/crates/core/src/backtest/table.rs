use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::{classify_outcomes, entry_days, holding_outcomes, BacktestError, BacktestVariant, FeeTier, HoldingOutcome};
use crate::amm::Token;
use crate::ingest::PoolSnapshot;

/// Marker written for cells without observations.
pub const UNDEFINED_CELL: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolType {
    OpenMarket,
    Stable,
}

impl fmt::Display for PoolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolType::OpenMarket => "OpenMarket",
            PoolType::Stable => "Stable",
        })
    }
}

/// Daily history of one pool plus the metadata that decides how it is
/// classified.
#[derive(Debug, Clone)]
pub struct PoolSeries {
    pub pair: String,
    pub pool_type: PoolType,
    /// Which token, if any, is the wrapped native asset.
    pub native: Option<Token>,
    pub variant: BacktestVariant,
    pub daily: Vec<PoolSnapshot>,
}

impl PoolSeries {
    pub fn new(pair: impl Into<String>, pool_type: PoolType, native: Option<Token>, daily: Vec<PoolSnapshot>) -> Self {
        PoolSeries { pair: pair.into(), pool_type, native, variant: BacktestVariant::for_native(native), daily }
    }

    pub fn with_variant(mut self, variant: BacktestVariant) -> Self {
        self.variant = variant;
        self
    }

    /// Holding outcomes with the wrapped native token on the y-axis when the
    /// asymmetric variant applies.
    pub fn oriented_outcomes(&self, period_days: u32, warmup_days: u32) -> Result<Vec<HoldingOutcome>, BacktestError> {
        let outcomes = holding_outcomes(&self.daily, period_days, warmup_days)?;
        let flip = self.variant == BacktestVariant::Asymmetric && self.native == Some(Token::X);
        Ok(if flip { outcomes.into_iter().map(HoldingOutcome::swapped).collect() } else { outcomes })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub pair: String,
    pub variant: BacktestVariant,
    pub pool_type: PoolType,
    /// Entry days after the warm-up.
    pub n: usize,
    /// Period-major: `cells[period * tiers + tier]`.
    pub cells: Vec<Option<f64>>,
}

/// Share of profitable observations per pool, holding period and fee tier.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    pub periods: Vec<u32>,
    pub tiers: Vec<FeeTier>,
    pub rows: Vec<TableRow>,
}

impl OutcomeTable {
    pub fn cell(&self, row: usize, period: usize, tier: usize) -> Option<f64> {
        self.rows[row].cells[period * self.tiers.len() + tier]
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), BacktestError> {
        let mut writer = csv::Writer::from_writer(sink);
        let mut header = vec!["pair".to_string(), "fee".into(), "type".into(), "n".into()];
        for p in &self.periods {
            for t in &self.tiers {
                header.push(format!("{p}d_{}", t.name()));
            }
        }
        writer.write_record(&header)?;
        for row in &self.rows {
            let mut record =
                vec![row.pair.clone(), row.variant.to_string(), row.pool_type.to_string(), row.n.to_string()];
            record.extend(row.cells.iter().map(|c| match c {
                Some(v) => v.to_string(),
                None => UNDEFINED_CELL.to_string(),
            }));
            writer.write_record(&record)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn build_row(
    pool: &PoolSeries,
    periods: &[u32],
    tiers: &[FeeTier],
    warmup_days: u32,
) -> Result<TableRow, BacktestError> {
    let mut cells = Vec::with_capacity(periods.len() * tiers.len());
    for &period in periods {
        let outcomes = pool.oriented_outcomes(period, warmup_days)?;
        for tier in tiers {
            cells.push(classify_outcomes(&outcomes, tier, pool.variant)?);
        }
    }
    Ok(TableRow {
        pair: pool.pair.clone(),
        variant: pool.variant,
        pool_type: pool.pool_type,
        n: entry_days(&pool.daily, warmup_days),
        cells,
    })
}

/// One row per pool, in input order. Pools are evaluated in parallel.
pub fn build_table(
    pools: &[PoolSeries],
    periods: &[u32],
    tiers: &[FeeTier],
    warmup_days: u32,
) -> Result<OutcomeTable, BacktestError> {
    if periods.contains(&0) {
        return Err(BacktestError::NonPositivePeriod);
    }
    let rows =
        pools.par_iter().map(|pool| build_row(pool, periods, tiers, warmup_days)).collect::<Result<Vec<_>, _>>()?;
    Ok(OutcomeTable { periods: periods.to_vec(), tiers: tiers.to_vec(), rows })
}

pub fn write_outcomes<W: Write>(sink: W, outcomes: &[HoldingOutcome]) -> Result<(), BacktestError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["entry_date", "period", "rel_x", "rel_y"])?;
    for o in outcomes {
        writer.write_record([
            o.entry_date.format("%Y-%m-%d").to_string(),
            o.period_days.to_string(),
            o.rel_x.to_string(),
            o.rel_y.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
