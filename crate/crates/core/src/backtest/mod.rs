//! Virtual LP positions built from daily snapshots.
//!
//! Every eligible day opens a position normalized to `(1, 1)`; after the
//! holding period its per-token reserves give the exit allocation
//! `(rel_x, rel_y)`, which is classified against the fee-shifted frontier.

mod overlay;
mod table;

pub use overlay::{frontier_overlay, sample_frontier, write_overlay, OverlayCurve, OverlayGrid};
pub use table::{build_table, write_outcomes, OutcomeTable, PoolSeries, PoolType, TableRow};

use std::fmt;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use thiserror::Error;

use crate::amm::Token;
use crate::frontier::{self, FeeModel, FeeVariant, FrontierError, PositionEndpoints};
use crate::ingest::PoolSnapshot;

/// Warm-up after pool deployment: observations start on the 11th day.
pub const DEFAULT_WARMUP_DAYS: u32 = 10;
/// Holding periods reported by default.
pub const DEFAULT_PERIODS: [u32; 3] = [30, 180, 360];

#[derive(Debug, Error)]
pub enum BacktestError {
    #[error("holding period must be positive")]
    NonPositivePeriod,
    #[error("invalid fee tier {0:?}")]
    InvalidTier(String),
    #[error("fee step must be finite and non-negative, got {0}")]
    InvalidFeeStep(f64),
    #[error("overlay grid needs an extent above 1 and at least two samples")]
    InvalidGrid,
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Exit allocation of one virtual position, relative to its entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldingOutcome {
    pub entry_date: NaiveDate,
    pub exit_date: NaiveDate,
    pub period_days: u32,
    pub rel_x: f64,
    pub rel_y: f64,
}

impl HoldingOutcome {
    /// Same outcome with the token axes exchanged.
    pub fn swapped(self) -> Self {
        HoldingOutcome { rel_x: self.rel_y, rel_y: self.rel_x, ..self }
    }
}

/// Positions opened on every day from `first + warmup_days` whose exit day
/// `entry + period_days` has a snapshot. Windows overlap.
pub fn holding_outcomes(
    daily: &[PoolSnapshot],
    period_days: u32,
    warmup_days: u32,
) -> Result<Vec<HoldingOutcome>, BacktestError> {
    if period_days == 0 {
        return Err(BacktestError::NonPositivePeriod);
    }
    let Some(first) = daily.first() else { return Ok(Vec::new()) };
    let Some(start) = first.date.checked_add_days(Days::new(warmup_days.into())) else {
        return Ok(Vec::new());
    };
    let outcomes = daily
        .iter()
        .filter(|entry| entry.date >= start)
        .filter_map(|entry| {
            let exit_date = entry.date.checked_add_days(Days::new(period_days.into()))?;
            let exit = daily.binary_search_by_key(&exit_date, |s| s.date).ok().map(|i| &daily[i])?;
            Some(HoldingOutcome {
                entry_date: entry.date,
                exit_date,
                period_days,
                rel_x: exit.normalized_x / entry.normalized_x,
                rel_y: exit.normalized_y / entry.normalized_y,
            })
        })
        .collect();
    Ok(outcomes)
}

/// Number of days eligible as position entries after the warm-up.
pub fn entry_days(daily: &[PoolSnapshot], warmup_days: u32) -> usize {
    let Some(first) = daily.first() else { return 0 };
    match first.date.checked_add_days(Days::new(warmup_days.into())) {
        Some(start) => daily.iter().filter(|s| s.date >= start).count(),
        None => 0,
    }
}

/// How the burn fee is denominated for a pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BacktestVariant {
    /// Neither token is the wrapped native asset.
    Symmetric,
    /// One token is the wrapped native asset; it is placed on the y-axis.
    Asymmetric,
}

impl BacktestVariant {
    pub fn fee_variant(self) -> FeeVariant {
        match self {
            BacktestVariant::Symmetric => FeeVariant::SymmetricBurn,
            BacktestVariant::Asymmetric => FeeVariant::AsymmetricBurn,
        }
    }

    pub fn for_native(native: Option<Token>) -> Self {
        match native {
            Some(_) => BacktestVariant::Asymmetric,
            None => BacktestVariant::Symmetric,
        }
    }
}

impl fmt::Display for BacktestVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BacktestVariant::Symmetric => "Symmetric",
            BacktestVariant::Asymmetric => "Asymmetric",
        })
    }
}

/// Relative position size, expressed as combined network fees over the
/// initial holdings. Fees split evenly between mint and burn.
#[derive(Debug, Clone, PartialEq)]
pub struct FeeTier {
    name: String,
    combined_fee_share: f64,
}

impl FeeTier {
    pub fn new(name: impl Into<String>, combined_fee_share: f64) -> Result<Self, BacktestError> {
        let name = name.into();
        if !(combined_fee_share.is_finite() && combined_fee_share >= 0.0) || name.is_empty() {
            return Err(BacktestError::InvalidTier(format!("{name}={combined_fee_share}")));
        }
        Ok(FeeTier { name, combined_fee_share })
    }

    pub fn small() -> Self {
        FeeTier { name: "small".into(), combined_fee_share: 0.10 }
    }

    pub fn medium() -> Self {
        FeeTier { name: "medium".into(), combined_fee_share: 0.05 }
    }

    pub fn large() -> Self {
        FeeTier { name: "large".into(), combined_fee_share: 0.01 }
    }

    /// Small, medium and large, in table order.
    pub fn standard() -> Vec<FeeTier> {
        vec![FeeTier::small(), FeeTier::medium(), FeeTier::large()]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn combined_fee_share(&self) -> f64 {
        self.combined_fee_share
    }

    /// Fee model on a position entered at `x0`: `mint = burn = share * x0 / 2`.
    pub fn fee_model(&self, variant: BacktestVariant, x0: f64) -> FeeModel {
        let each = self.combined_fee_share * x0 / 2.0;
        FeeModel::new(variant.fee_variant(), each, each).expect("tier share validated on construction")
    }
}

impl FromStr for FeeTier {
    type Err = BacktestError;

    /// `small`, `medium`, `large`, `<name>=<share>` or a bare share.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "small" => return Ok(FeeTier::small()),
            "medium" | "med" => return Ok(FeeTier::medium()),
            "large" => return Ok(FeeTier::large()),
            _ => {}
        }
        let (name, share) = s.split_once('=').unwrap_or((s, s));
        let share: f64 = share.trim().parse().map_err(|_| BacktestError::InvalidTier(s.to_string()))?;
        FeeTier::new(name.trim(), share)
    }
}

/// Whether a single outcome beats holding under `tier`.
pub fn classify_outcome(
    outcome: &HoldingOutcome,
    tier: &FeeTier,
    variant: BacktestVariant,
) -> Result<bool, BacktestError> {
    let position = PositionEndpoints::unit(outcome.rel_x, outcome.rel_y)?;
    Ok(frontier::is_profitable(&position, &tier.fee_model(variant, 1.0)).profitable)
}

/// Share of profitable outcomes; `None` when there are no outcomes.
pub fn classify_outcomes(
    outcomes: &[HoldingOutcome],
    tier: &FeeTier,
    variant: BacktestVariant,
) -> Result<Option<f64>, BacktestError> {
    if outcomes.is_empty() {
        return Ok(None);
    }
    let mut profitable = 0usize;
    for o in outcomes {
        if classify_outcome(o, tier, variant)? {
            profitable += 1;
        }
    }
    Ok(Some(profitable as f64 / outcomes.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(day: u32, nx: f64, ny: f64) -> PoolSnapshot {
        PoolSnapshot {
            date: NaiveDate::from_ymd_opt(2021, 1, 1).unwrap() + Days::new(day.into()),
            reserve_x: 0,
            reserve_y: 0,
            lp_supply: 1,
            normalized_x: nx,
            normalized_y: ny,
        }
    }

    fn outcome(rel_x: f64, rel_y: f64) -> HoldingOutcome {
        let d = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        HoldingOutcome { entry_date: d, exit_date: d, period_days: 1, rel_x, rel_y }
    }

    #[test]
    fn constant_pool_gives_unit_outcomes() {
        let daily: Vec<_> = (0..50).map(|d| snap(d, 3.0, 5.0)).collect();
        let out = holding_outcomes(&daily, 30, 10).unwrap();
        assert_eq!(out.len(), 50 - 10 - 30);
        assert!(out.iter().all(|o| o.rel_x == 1.0 && o.rel_y == 1.0));
        assert_eq!(out[0].entry_date, daily[10].date);
        assert_eq!(out[0].exit_date, daily[40].date);
    }

    #[test]
    fn doubling_reserves() {
        let daily = vec![snap(0, 1.0, 1.0), snap(1, 2.0, 2.0)];
        let out = holding_outcomes(&daily, 1, 0).unwrap();
        assert_eq!((out[0].rel_x, out[0].rel_y), (2.0, 2.0));
    }

    #[test]
    fn short_series_and_gaps() {
        let daily: Vec<_> = (0..5).map(|d| snap(d, 1.0, 1.0)).collect();
        assert!(holding_outcomes(&daily, 30, 0).unwrap().is_empty());
        assert!(holding_outcomes(&[], 1, 0).unwrap().is_empty());
        assert!(matches!(holding_outcomes(&daily, 0, 0), Err(BacktestError::NonPositivePeriod)));
        // Day 2 missing: entry 0 and entry 2 both lose their exit or entry.
        let daily = vec![snap(0, 1.0, 1.0), snap(1, 1.0, 1.0), snap(3, 1.0, 1.0)];
        let out = holding_outcomes(&daily, 2, 0).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].entry_date, daily[1].date);
        assert_eq!(entry_days(&daily, 1), 2);
    }

    #[test]
    fn tiers() {
        assert_eq!(FeeTier::small().combined_fee_share(), 0.10);
        assert_eq!(FeeTier::medium().combined_fee_share(), 0.05);
        assert_eq!(FeeTier::large().combined_fee_share(), 0.01);
        assert_eq!("Large".parse::<FeeTier>().unwrap(), FeeTier::large());
        let t: FeeTier = "zero=0".parse().unwrap();
        assert_eq!((t.name(), t.combined_fee_share()), ("zero", 0.0));
        let t: FeeTier = "0.2".parse().unwrap();
        assert_eq!((t.name(), t.combined_fee_share()), ("0.2", 0.2));
        assert!("huge".parse::<FeeTier>().is_err());
        assert!("x=-1".parse::<FeeTier>().is_err());

        let m = FeeTier::large().fee_model(BacktestVariant::Asymmetric, 1.0);
        assert_eq!((m.mint_fee(), m.burn_fee()), (0.005, 0.005));
        assert_eq!(m.variant(), FeeVariant::AsymmetricBurn);
    }

    #[test]
    fn classification_examples() {
        let flat = vec![outcome(1.0, 1.0); 4];
        for tier in FeeTier::standard() {
            for v in [BacktestVariant::Symmetric, BacktestVariant::Asymmetric] {
                assert_eq!(classify_outcomes(&flat, &tier, v).unwrap(), Some(0.0));
            }
        }
        let grown = [outcome(1.2, 1.2)];
        // 2.4 - 2 * 1.005 > 0
        assert_eq!(classify_outcomes(&grown, &FeeTier::large(), BacktestVariant::Symmetric).unwrap(), Some(1.0));
        assert_eq!(classify_outcomes(&[], &FeeTier::large(), BacktestVariant::Symmetric).unwrap(), None);

        let mixed = [outcome(1.2, 1.2), outcome(1.0, 1.0), outcome(2.0, 0.5), outcome(1.3, 1.3)];
        assert_eq!(classify_outcomes(&mixed, &FeeTier::large(), BacktestVariant::Symmetric).unwrap(), Some(0.5));
    }

    #[test]
    fn swapped_axes() {
        let o = outcome(2.0, 0.5).swapped();
        assert_eq!((o.rel_x, o.rel_y), (0.5, 2.0));
    }
}
