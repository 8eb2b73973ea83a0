use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use cpmm_frontier::backtest::{sample_frontier, OverlayGrid};
use cpmm_frontier::frontier::{
    breakeven_invariant, frontier_limits, frontier_pole, frontier_y1, FeeModel, FeeVariant, FrontierError,
    FrontierLimits,
};
use serde::Serialize;

use crate::io::{create_dir, write_file, write_manifest};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    None,
    Mint,
    Symmetric,
    Asymmetric,
}

impl From<VariantArg> for FeeVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::None => FeeVariant::NoFees,
            VariantArg::Mint => FeeVariant::MintOnly,
            VariantArg::Symmetric => FeeVariant::SymmetricBurn,
            VariantArg::Asymmetric => FeeVariant::AsymmetricBurn,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierConfig {
    pub x0: f64,
    pub y0: f64,
    pub mint_fee: f64,
    pub burn_fee: f64,
    pub variant: VariantArg,
    /// Exit x1 values to evaluate; empty evaluates at `x0`.
    pub x1: Vec<f64>,
    pub samples: usize,
    pub extent: f64,
    pub out: Option<PathBuf>,
}

impl Default for FrontierConfig {
    fn default() -> Self {
        let grid = OverlayGrid::default();
        FrontierConfig {
            x0: 1.0,
            y0: 1.0,
            mint_fee: 0.0,
            burn_fee: 0.0,
            variant: VariantArg::None,
            x1: Vec::new(),
            samples: grid.samples,
            extent: grid.extent,
            out: None,
        }
    }
}

impl FrontierConfig {
    pub(crate) fn fee_model(&self) -> Result<FeeModel, CliError> {
        for (name, v) in [("--x0", self.x0), ("--y0", self.y0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(FeeModel::new(self.variant.into(), self.mint_fee, self.burn_fee)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierReport {
    pub pole: f64,
    pub limits: FrontierLimits,
    /// Smallest exit invariant with a breakeven allocation.
    pub breakeven_k: f64,
    /// Requested evaluations `(x1, y1)`.
    pub points: Vec<(f64, f64)>,
    /// Curve samples written to `frontier.csv`, ordered by x1.
    pub curve: Vec<(f64, f64)>,
    pub outputs: Vec<PathBuf>,
}

impl fmt::Display for FrontierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pole: x1 > {}", self.pole)?;
        writeln!(
            f,
            "limits: y1 -> {} (x1 -> inf), x1 -> {} (y1 -> inf)",
            self.limits.y_asymptote, self.limits.x_asymptote
        )?;
        writeln!(f, "breakeven k1: {}", self.breakeven_k)?;
        for (x1, y1) in &self.points {
            writeln!(f, "x1={x1} y1={y1}")?;
        }
        for p in &self.outputs {
            writeln!(f, "wrote {}", p.display())?;
        }
        Ok(())
    }
}

fn write_curve<W: Write>(sink: W, curve: &[(f64, f64)]) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["x1", "y1"])?;
    for (x1, y1) in curve {
        writer.write_record([x1.to_string(), y1.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Evaluates the breakeven frontier and, with `out` set, writes its samples.
pub fn cmd_frontier(config: &FrontierConfig) -> Result<FrontierReport, CliError> {
    let fees = config.fee_model()?;
    let (x0, y0) = (config.x0, config.y0);
    let grid = OverlayGrid { extent: config.extent, samples: config.samples };

    let pole = frontier_pole(x0, y0, &fees);
    let requested = if config.x1.is_empty() { vec![x0] } else { config.x1.clone() };
    let points = requested
        .iter()
        .map(|&x1| match frontier_y1(x1, x0, y0, &fees) {
            Ok(y1) => Ok((x1, y1)),
            Err(FrontierError::FrontierUndefined { .. }) => Err(CliError::Config(format!(
                "x1 = {x1} is outside the frontier domain (x1 must exceed the pole {pole})"
            ))),
            Err(e) => Err(e.into()),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut curve =
        sample_frontier(x0, y0, &fees, grid).map_err(|e| CliError::Config(format!("--samples/--extent: {e}")))?;
    curve.extend(points.iter().copied());
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    curve.dedup_by(|a, b| a.0 == b.0);

    let mut outputs = Vec::new();
    if let Some(dir) = &config.out {
        create_dir(dir)?;
        outputs.push(write_file(dir, "frontier.csv", |w| write_curve(w, &curve))?);
        outputs.push(write_manifest(dir, "frontier", config, &outputs)?);
    }
    Ok(FrontierReport {
        pole,
        limits: frontier_limits(x0, y0, &fees),
        breakeven_k: breakeven_invariant(x0, y0, &fees),
        points,
        curve,
        outputs,
    })
}
