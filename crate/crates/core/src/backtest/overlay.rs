use std::io::Write;

use super::{BacktestError, BacktestVariant, FeeTier};
use crate::frontier::{frontier_limits, frontier_pole, frontier_y1, FeeModel};

/// Sampling window for overlay curves, as multiples of the entry allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayGrid {
    /// Curves are clipped to `x1 <= extent * x0` and `y1 <= extent * y0`.
    pub extent: f64,
    pub samples: usize,
}

impl Default for OverlayGrid {
    fn default() -> Self {
        OverlayGrid { extent: 3.0, samples: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlayCurve {
    /// Combined mint and burn fees in percent of the entry x holdings.
    pub fee_pct: f64,
    pub points: Vec<(f64, f64)>,
}

/// Frontier curves for a list of combined fee percentages.
///
/// The asymmetric variant draws fees paid in the y-token, the symmetric one
/// fees constant relative to pool value. Samples are log-spaced in the
/// distance from the pole so the steep part near the asymptote is resolved.
pub fn frontier_overlay(
    x0: f64,
    y0: f64,
    variant: BacktestVariant,
    fee_steps: &[f64],
    grid: OverlayGrid,
) -> Result<Vec<OverlayCurve>, BacktestError> {
    if !(grid.extent.is_finite() && grid.extent > 1.0) || grid.samples < 2 {
        return Err(BacktestError::InvalidGrid);
    }
    fee_steps
        .iter()
        .map(|&pct| {
            if !(pct.is_finite() && pct >= 0.0) {
                return Err(BacktestError::InvalidFeeStep(pct));
            }
            let fees = FeeTier::new(format!("{pct}%"), pct / 100.0)?.fee_model(variant, x0);
            Ok(OverlayCurve { fee_pct: pct, points: sample_frontier(x0, y0, &fees, grid)? })
        })
        .collect()
}

/// Samples the frontier of `fees` inside the grid window, ordered by x1.
/// Empty when the whole curve lies above `extent * y0`.
pub fn sample_frontier(x0: f64, y0: f64, fees: &FeeModel, grid: OverlayGrid) -> Result<Vec<(f64, f64)>, BacktestError> {
    if !(grid.extent.is_finite() && grid.extent > 1.0) || grid.samples < 2 {
        return Err(BacktestError::InvalidGrid);
    }
    let pole = frontier_pole(x0, y0, fees);
    let limits = frontier_limits(x0, y0, fees);
    let (x_max, y_max) = (grid.extent * x0, grid.extent * y0);
    // y1(x) = y_max  <=>  x = y_max * pole / (y_max - y_asymptote)
    let x_min = if y_max > limits.y_asymptote { y_max * pole / (y_max - limits.y_asymptote) } else { x_max };
    let mut points = Vec::new();
    if x_min < x_max {
        let (lo, hi) = ((x_min - pole).ln(), (x_max - pole).ln());
        let last = (grid.samples - 1) as f64;
        for i in 0..grid.samples {
            let x1 = pole + (lo + (hi - lo) * i as f64 / last).exp();
            points.push((x1, frontier_y1(x1, x0, y0, fees)?));
        }
    }
    Ok(points)
}

pub fn write_overlay<W: Write>(sink: W, curves: &[OverlayCurve]) -> Result<(), BacktestError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["fee_pct", "x1", "y1"])?;
    for c in curves {
        for (x1, y1) in &c.points {
            writer.write_record([c.fee_pct.to_string(), x1.to_string(), y1.to_string()])?;
        }
    }
    writer.flush()?;
    Ok(())
}
