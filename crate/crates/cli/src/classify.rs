use std::fmt;

use cpmm_frontier::frontier::{
    classify_case, divergence_loss, hold_value, is_profitable, lp_value, CaseLabel, FrontierError, PositionEndpoints,
    Profitability, DEFAULT_CASE_TOLERANCE,
};
use serde::Serialize;

use crate::frontier::VariantArg;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyConfig {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub mint_fee: f64,
    pub burn_fee: f64,
    pub variant: VariantArg,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyReport {
    /// `None` when the invariant shrank.
    pub case: Option<CaseLabel>,
    pub invariant_ratio: f64,
    pub price_ratio_change: f64,
    pub divergence_loss: f64,
    pub hold_value: f64,
    pub lp_value: f64,
    pub profitability: Profitability,
}

impl fmt::Display for ClassifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.case {
            Some(c) => writeln!(f, "case: {c:?}")?,
            None => writeln!(f, "case: none (invariant shrank)")?,
        }
        writeln!(f, "k1/k0: {}", self.invariant_ratio)?;
        writeln!(f, "r: {}", self.price_ratio_change)?;
        writeln!(f, "divergence loss: {}", self.divergence_loss)?;
        writeln!(f, "hold value: {}", self.hold_value)?;
        writeln!(f, "lp value: {}", self.lp_value)?;
        writeln!(f, "margin: {}", self.profitability.margin)?;
        writeln!(f, "profitable: {}", self.profitability.profitable)
    }
}

/// Profitability of a single position under the given fees.
pub fn cmd_classify(config: &ClassifyConfig) -> Result<ClassifyReport, CliError> {
    if !(config.tolerance.is_finite() && config.tolerance >= 0.0) {
        return Err(CliError::Config(format!("--tolerance must be non-negative, got {}", config.tolerance)));
    }
    let fees = cpmm_frontier::frontier::FeeModel::new(config.variant.into(), config.mint_fee, config.burn_fee)?;
    let p = PositionEndpoints::new(config.x0, config.y0, config.x1, config.y1)?;
    let case = match classify_case(&p, config.tolerance) {
        Ok(c) => Some(c),
        Err(FrontierError::InvariantShrunk { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(ClassifyReport {
        case,
        invariant_ratio: p.k1() / p.k0(),
        price_ratio_change: p.price_ratio_change(),
        divergence_loss: divergence_loss(p.price_ratio_change())?,
        hold_value: hold_value(&p),
        lp_value: lp_value(&p),
        profitability: is_profitable(&p, &fees),
    })
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            x0: 1.0,
            y0: 1.0,
            x1: 1.0,
            y1: 1.0,
            mint_fee: 0.0,
            burn_fee: 0.0,
            variant: VariantArg::None,
            tolerance: DEFAULT_CASE_TOLERANCE,
        }
    }
}
