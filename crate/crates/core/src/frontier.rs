//! Closed-form LP profitability analytics.
//!
//! A position enters the pool at `(x0, y0)` and leaves with `(x1, y1)`. Both
//! strategies are valued in x-terms at exit prices:
//!
//! * hold: `x0 + y0 * x1 / y1`
//! * provide liquidity: `x1 + y1 * x1 / y1 = 2 * x1`
//!
//! Mint and burn network fees (`mint_fee`, `burn_fee`, denominated in x-token
//! units at entry prices) shift the breakeven locus. Every variant's frontier
//! has the form `y1 = a * x1 / (2 * x1 - b)`, so the pole sits at `x1 = b / 2`
//! and the asymptotes are `y1 -> a / 2` and `x1 -> b / 2`.

use thiserror::Error;

/// Relative tolerance for case classification and on-frontier membership.
pub const DEFAULT_CASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontierError {
    #[error("{0} must be finite and strictly positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("{0} must be finite and non-negative, got {1}")]
    NegativeFee(&'static str, f64),
    #[error("fee variant {variant:?} does not take a {fee}")]
    FeeNotAllowed { variant: FeeVariant, fee: &'static str },
    #[error("price-ratio change must be positive, got {0}")]
    Domain(f64),
    #[error("invariant shrank: k1/k0 = {ratio}")]
    InvariantShrunk { ratio: f64 },
    #[error("frontier is undefined at x1 = {x1}; pole at {pole}")]
    FrontierUndefined { x1: f64, pole: f64 },
}

fn positive(name: &'static str, v: f64) -> Result<f64, FrontierError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(FrontierError::NonPositive(name, v))
    }
}

/// Entry and exit allocations of one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEndpoints {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl PositionEndpoints {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, FrontierError> {
        Ok(PositionEndpoints {
            x0: positive("x0", x0)?,
            y0: positive("y0", y0)?,
            x1: positive("x1", x1)?,
            y1: positive("y1", y1)?,
        })
    }

    /// Position entered at the unit allocation `(1, 1)`.
    pub fn unit(x1: f64, y1: f64) -> Result<Self, FrontierError> {
        PositionEndpoints::new(1.0, 1.0, x1, y1)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn k0(&self) -> f64 {
        self.x0 * self.y0
    }

    pub fn k1(&self) -> f64 {
        self.x1 * self.y1
    }

    /// `(x1 * y0) / (y1 * x0)`; equals one iff the allocation ratio is unchanged.
    pub fn price_ratio_change(&self) -> f64 {
        (self.x1 * self.y0) / (self.y1 * self.x0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeeVariant {
    NoFees,
    MintOnly,
    /// Burn fee constant relative to normalized pool value (no wrapped native
    /// token in the pool).
    SymmetricBurn,
    /// Burn fee paid in the y-token, which is the wrapped native asset.
    AsymmetricBurn,
}

/// Mint and burn network fees plus the variant that says how they enter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeeModel {
    mint_fee: f64,
    burn_fee: f64,
    variant: FeeVariant,
}

impl FeeModel {
    pub fn new(variant: FeeVariant, mint_fee: f64, burn_fee: f64) -> Result<Self, FrontierError> {
        for (name, v) in [("mint fee", mint_fee), ("burn fee", burn_fee)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(FrontierError::NegativeFee(name, v));
            }
        }
        match variant {
            FeeVariant::NoFees if mint_fee != 0.0 => {
                return Err(FrontierError::FeeNotAllowed { variant, fee: "mint fee" })
            }
            FeeVariant::NoFees | FeeVariant::MintOnly if burn_fee != 0.0 => {
                return Err(FrontierError::FeeNotAllowed { variant, fee: "burn fee" })
            }
            _ => {}
        }
        Ok(FeeModel { mint_fee, burn_fee, variant })
    }

    pub fn none() -> Self {
        FeeModel { mint_fee: 0.0, burn_fee: 0.0, variant: FeeVariant::NoFees }
    }

    pub fn mint_only(mint_fee: f64) -> Result<Self, FrontierError> {
        FeeModel::new(FeeVariant::MintOnly, mint_fee, 0.0)
    }

    pub fn symmetric(mint_fee: f64, burn_fee: f64) -> Result<Self, FrontierError> {
        FeeModel::new(FeeVariant::SymmetricBurn, mint_fee, burn_fee)
    }

    pub fn asymmetric(mint_fee: f64, burn_fee: f64) -> Result<Self, FrontierError> {
        FeeModel::new(FeeVariant::AsymmetricBurn, mint_fee, burn_fee)
    }

    pub fn mint_fee(&self) -> f64 {
        self.mint_fee
    }

    pub fn burn_fee(&self) -> f64 {
        self.burn_fee
    }

    pub fn variant(&self) -> FeeVariant {
        self.variant
    }

    /// Factor applied to the hold value.
    fn hold_factor(&self, x0: f64) -> f64 {
        match self.variant {
            FeeVariant::NoFees => 1.0,
            FeeVariant::MintOnly | FeeVariant::AsymmetricBurn => 1.0 + self.mint_fee / (2.0 * x0),
            FeeVariant::SymmetricBurn => 1.0 + (self.mint_fee + self.burn_fee) / (2.0 * x0),
        }
    }

    /// Coefficients `(a, b)` of the frontier `y1 = a * x1 / (2 * x1 - b)`.
    fn curve(&self, x0: f64, y0: f64) -> (f64, f64) {
        match self.variant {
            FeeVariant::NoFees => (y0, x0),
            FeeVariant::MintOnly => (y0 * (1.0 + self.mint_fee / (2.0 * x0)), x0 + self.mint_fee / 2.0),
            FeeVariant::SymmetricBurn => {
                let total = self.mint_fee + self.burn_fee;
                (y0 * (1.0 + total / (2.0 * x0)), x0 + total / 2.0)
            }
            FeeVariant::AsymmetricBurn => {
                (y0 * (1.0 + (self.mint_fee / 2.0 + self.burn_fee) / x0), x0 + self.mint_fee / 2.0)
            }
        }
    }
}

impl Default for FeeModel {
    fn default() -> Self {
        FeeModel::none()
    }
}

/// Buy-and-hold value in x-terms at exit prices.
pub fn hold_value(p: &PositionEndpoints) -> f64 {
    p.x0 + p.y0 * (p.x1 / p.y1)
}

/// Value of the pool position in x-terms at exit prices.
pub fn lp_value(p: &PositionEndpoints) -> f64 {
    2.0 * p.x1
}

/// Relative loss of the pool position against holding when only the price
/// ratio moved by `r`: `2 * sqrt(r) / (1 + r) - 1`.
pub fn divergence_loss(r: f64) -> Result<f64, FrontierError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(FrontierError::Domain(r));
    }
    Ok(2.0 * r.sqrt() / (1.0 + r) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// Same invariant, same ratio: hold and LP are worth the same.
    Case1,
    /// Same invariant, moved ratio: pure divergence loss.
    Case2,
    /// Invariant grew, same ratio: fees only.
    Case3,
    /// Invariant grew and ratio moved: both effects compete.
    Case4,
}

pub fn classify_case(p: &PositionEndpoints, tolerance: f64) -> Result<CaseLabel, FrontierError> {
    let k_ratio = p.k1() / p.k0();
    if k_ratio < 1.0 - tolerance {
        return Err(FrontierError::InvariantShrunk { ratio: k_ratio });
    }
    let k_grew = k_ratio > 1.0 + tolerance;
    let ratio_moved = (p.price_ratio_change() - 1.0).abs() > tolerance;
    Ok(match (k_grew, ratio_moved) {
        (false, false) => CaseLabel::Case1,
        (false, true) => CaseLabel::Case2,
        (true, false) => CaseLabel::Case3,
        (true, true) => CaseLabel::Case4,
    })
}

/// Smallest exit x1 for which the frontier of `fees` is defined (exclusive).
pub fn frontier_pole(x0: f64, y0: f64, fees: &FeeModel) -> f64 {
    fees.curve(x0, y0).1 / 2.0
}

/// Breakeven exit y1 for a given exit x1.
pub fn frontier_y1(x1: f64, x0: f64, y0: f64, fees: &FeeModel) -> Result<f64, FrontierError> {
    positive("x0", x0)?;
    positive("y0", y0)?;
    let (a, b) = fees.curve(x0, y0);
    let denominator = 2.0 * x1 - b;
    if !(x1.is_finite() && denominator > 0.0) {
        return Err(FrontierError::FrontierUndefined { x1, pole: b / 2.0 });
    }
    Ok(a * x1 / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierLimits {
    /// Limit of y1 as x1 grows without bound.
    pub y_asymptote: f64,
    /// Limit of x1 as y1 grows without bound.
    pub x_asymptote: f64,
}

pub fn frontier_limits(x0: f64, y0: f64, fees: &FeeModel) -> FrontierLimits {
    let (a, b) = fees.curve(x0, y0);
    FrontierLimits { y_asymptote: a / 2.0, x_asymptote: b / 2.0 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profitability {
    /// `margin > 0`; a position exactly on the frontier is not profitable.
    pub profitable: bool,
    /// LP side minus hold side of the variant's breakeven equation, in x-terms.
    pub margin: f64,
}

pub fn is_profitable(p: &PositionEndpoints, fees: &FeeModel) -> Profitability {
    let hold_side = hold_value(p) * fees.hold_factor(p.x0);
    let lp_side = match fees.variant {
        FeeVariant::AsymmetricBurn => lp_value(p) - fees.burn_fee * p.price_ratio_change(),
        _ => lp_value(p),
    };
    let margin = lp_side - hold_side;
    Profitability { profitable: margin > 0.0, margin }
}

/// An exit allocation on a k1-curve together with its price of x (`y1 / x1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub x1: f64,
    pub y1: f64,
    pub price_ratio: f64,
}

impl Allocation {
    fn on_curve(x1: f64, k1: f64) -> Self {
        let y1 = k1 / x1;
        Allocation { x1, y1, price_ratio: y1 / x1 }
    }
}

/// The two points where the frontier crosses the curve `x1 * y1 = k1`.
/// Profitable allocations on that curve lie strictly between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceLimits {
    /// Intersection with the higher price of x (smaller x1).
    pub upper: Allocation,
    pub lower: Allocation,
}

/// Intersects the frontier with `y1 = k1 / x1`.
///
/// Substituting gives `a * x1^2 - 2 * k1 * x1 + k1 * b = 0`. Returns `None`
/// when the discriminant is negative, i.e. no allocation on the k1-curve
/// beats holding.
pub fn price_limits(x0: f64, y0: f64, k1: f64, fees: &FeeModel) -> Result<Option<PriceLimits>, FrontierError> {
    positive("x0", x0)?;
    positive("y0", y0)?;
    positive("k1", k1)?;
    let (a, b) = fees.curve(x0, y0);
    let discriminant = k1 * (k1 - a * b);
    if discriminant < 0.0 {
        return Ok(None);
    }
    // Larger root directly, smaller one from the product of roots k1 * b / a.
    let q = k1 + discriminant.sqrt();
    let x_large = q / a;
    let x_small = k1 * b / q;
    let pole = b / 2.0;
    if x_small <= pole {
        return Ok(None);
    }
    Ok(Some(PriceLimits { upper: Allocation::on_curve(x_small, k1), lower: Allocation::on_curve(x_large, k1) }))
}

/// Smallest k1 for which some allocation breaks even (tangency of the
/// frontier with the k1-curve).
pub fn breakeven_invariant(x0: f64, y0: f64, fees: &FeeModel) -> f64 {
    let (a, b) = fees.curve(x0, y0);
    a * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pos(x0: f64, y0: f64, x1: f64, y1: f64) -> PositionEndpoints {
        PositionEndpoints::new(x0, y0, x1, y1).unwrap()
    }

    #[test]
    fn endpoints_validation() {
        assert!(PositionEndpoints::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(PositionEndpoints::new(1.0, 1.0, f64::INFINITY, 1.0).is_err());
        let p = pos(1.0, 2.0, 3.0, 4.0);
        assert_eq!((p.k0(), p.k1()), (2.0, 12.0));
        assert_eq!(p.price_ratio_change(), 1.5);
        assert_eq!(pos(1.0, 2.0, 2.0, 4.0).price_ratio_change(), 1.0);
    }

    #[test]
    fn hold_and_lp_values() {
        assert_eq!(hold_value(&pos(1.0, 1.0, 1.0, 1.0)), 2.0);
        assert_relative_eq!(hold_value(&pos(1.0, 1.0, 1.1, 0.95)), 1.0 + 1.1 / 0.95);
        assert!((hold_value(&pos(1.0, 1.0, 1.1, 0.95)) - 2.157894).abs() < 1e-6);
        assert_eq!(hold_value(&pos(2.0, 2.0, 3.0, 1.5)), 6.0);
        assert_eq!(lp_value(&pos(1.0, 1.0, 1.0, 7.0)), 2.0);
        assert_eq!(lp_value(&pos(1.0, 1.0, 3.0, 7.0)), 6.0);
        assert_eq!(lp_value(&pos(1.0, 1.0, 0.5, 7.0)), 1.0);
    }

    #[test]
    fn divergence_loss_values() {
        assert_eq!(divergence_loss(1.0).unwrap(), 0.0);
        assert!((divergence_loss(2.0).unwrap() - (2.0 * 2f64.sqrt() / 3.0 - 1.0)).abs() < 1e-15);
        assert!((divergence_loss(2.0).unwrap() + 0.057190958).abs() < 1e-9);
        assert!((divergence_loss(4.0).unwrap() + 0.2).abs() < 1e-15);
        assert_eq!(divergence_loss(0.0), Err(FrontierError::Domain(0.0)));
        assert!(divergence_loss(-1.0).is_err());
    }

    #[test]
    fn case_classification() {
        let eps = DEFAULT_CASE_TOLERANCE;
        assert_eq!(classify_case(&pos(1.0, 1.0, 1.0, 1.0), eps).unwrap(), CaseLabel::Case1);
        assert_eq!(classify_case(&pos(1.0, 1.0, 2.0, 0.5), eps).unwrap(), CaseLabel::Case2);
        assert_eq!(classify_case(&pos(1.0, 1.0, 1.2, 1.2), eps).unwrap(), CaseLabel::Case3);
        assert_eq!(classify_case(&pos(1.0, 1.0, 1.5, 1.0), eps).unwrap(), CaseLabel::Case4);
        assert!(matches!(classify_case(&pos(1.0, 1.0, 0.9, 0.9), eps), Err(FrontierError::InvariantShrunk { .. })));
        // Within tolerance counts as equal.
        assert_eq!(classify_case(&pos(1.0, 1.0, 1.0 + 1e-12, 1.0), eps).unwrap(), CaseLabel::Case1);
    }

    #[test]
    fn frontier_examples() {
        let y = frontier_y1(2.0, 2.0, 2.0, &FeeModel::none()).unwrap();
        assert_eq!(y, 2.0);
        let y = frontier_y1(3.0, 2.0, 2.0, &FeeModel::mint_only(0.5).unwrap()).unwrap();
        assert!((y - 1.8).abs() < 1e-12);
        let y = frontier_y1(3.0, 2.0, 2.0, &FeeModel::symmetric(0.5, 0.5).unwrap()).unwrap();
        assert!((y - 7.5 / 3.5).abs() < 1e-12);
        let y = frontier_y1(3.0, 2.0, 2.0, &FeeModel::asymmetric(0.5, 0.5).unwrap()).unwrap();
        assert!((y - 2.2).abs() < 1e-12);
    }

    #[test]
    fn frontier_rejects_pole_and_left_of_it() {
        let fees = FeeModel::symmetric(0.5, 0.5).unwrap();
        let pole = frontier_pole(2.0, 2.0, &fees);
        assert_eq!(pole, 1.25);
        assert!(matches!(frontier_y1(pole, 2.0, 2.0, &fees), Err(FrontierError::FrontierUndefined { .. })));
        assert!(frontier_y1(1.0, 2.0, 2.0, &fees).is_err());
        assert!(frontier_y1(pole + 1e-9, 2.0, 2.0, &fees).is_ok());
        assert_eq!(frontier_pole(2.0, 2.0, &FeeModel::mint_only(0.5).unwrap()), 1.125);
        assert_eq!(frontier_pole(2.0, 2.0, &FeeModel::asymmetric(0.5, 0.5).unwrap()), 1.125);
        assert_eq!(frontier_pole(2.0, 2.0, &FeeModel::none()), 1.0);
    }

    #[test]
    fn limits_examples() {
        let l = frontier_limits(2.0, 2.0, &FeeModel::none());
        assert_eq!((l.y_asymptote, l.x_asymptote), (1.0, 1.0));
        let l = frontier_limits(2.0, 2.0, &FeeModel::symmetric(0.25, 0.75).unwrap());
        assert_eq!((l.y_asymptote, l.x_asymptote), (1.25, 1.25));
        let l = frontier_limits(2.0, 2.0, &FeeModel::asymmetric(0.5, 0.5).unwrap());
        assert_eq!((l.y_asymptote, l.x_asymptote), (1.375, 1.125));
        let l = frontier_limits(2.0, 4.0, &FeeModel::mint_only(1.0).unwrap());
        assert_eq!((l.y_asymptote, l.x_asymptote), (2.5, 1.25));
    }

    #[test]
    fn profitability_examples() {
        let r = is_profitable(&pos(1.0, 1.0, 1.0, 1.0), &FeeModel::none());
        assert!(!r.profitable);
        assert_eq!(r.margin, 0.0);

        let p = pos(1.0, 1.0, 1.1, 0.95);
        let r = is_profitable(&p, &FeeModel::none());
        assert!(r.profitable);
        assert!((r.margin - (2.2 - (1.0 + 1.1 / 0.95))).abs() < 1e-15);
        assert!((r.margin - 0.042105).abs() < 1e-6);

        // (mint + burn) / (2 * x0) = 0.05
        let r = is_profitable(&p, &FeeModel::symmetric(0.05, 0.05).unwrap());
        assert!(!r.profitable);
        assert!((r.margin - (2.2 - 1.05 * (1.0 + 1.1 / 0.95))).abs() < 1e-14);
        assert!((1.05 * (1.0 + 1.1 / 0.95) - 2.265789_f64).abs() < 1e-6);
    }

    #[test]
    fn asymmetric_margin_includes_revalued_burn_fee() {
        let p = pos(2.0, 2.0, 3.0, 1.5);
        let fees = FeeModel::asymmetric(0.5, 0.5).unwrap();
        let r = is_profitable(&p, &fees);
        let expected = 6.0 - 0.5 * (3.0 * 2.0) / (2.0 * 1.5) - (2.0 + 2.0 * 3.0 / 1.5) * 1.125;
        assert!((r.margin - expected).abs() < 1e-14);
    }

    #[test]
    fn price_limit_examples() {
        let fees = FeeModel::none();
        let l = price_limits(2.0, 2.0, 4.0, &fees).unwrap().unwrap();
        assert_eq!((l.upper.x1, l.upper.y1), (2.0, 2.0));
        assert_eq!((l.lower.x1, l.lower.y1), (2.0, 2.0));

        let l = price_limits(2.0, 2.0, 5.3, &fees).unwrap().unwrap();
        let root = 6.89f64.sqrt();
        assert!((l.lower.x1 - (5.3 + root) / 2.0).abs() < 1e-12);
        assert!((l.upper.x1 - (5.3 - root) / 2.0).abs() < 1e-12);
        assert!((l.lower.x1 - 3.96245).abs() < 1e-4);
        assert!((l.upper.x1 - 1.33754).abs() < 1e-4);
        assert!(l.upper.price_ratio >= l.lower.price_ratio);

        assert_eq!(price_limits(2.0, 2.0, 3.0, &fees).unwrap(), None);
        assert!(price_limits(2.0, 2.0, 0.0, &fees).is_err());
    }

    #[test]
    fn fee_model_validation() {
        assert!(FeeModel::new(FeeVariant::NoFees, 0.1, 0.0).is_err());
        assert!(FeeModel::new(FeeVariant::MintOnly, 0.1, 0.1).is_err());
        assert!(FeeModel::symmetric(-0.1, 0.0).is_err());
        assert!(FeeModel::asymmetric(0.0, f64::NAN).is_err());
        assert!(FeeModel::asymmetric(0.0, 0.0).is_ok());
    }

    #[test]
    fn breakeven_invariant_is_tangency() {
        let fees = FeeModel::symmetric(0.2, 0.3).unwrap();
        let k = breakeven_invariant(2.0, 3.0, &fees);
        let l = price_limits(2.0, 3.0, k, &fees).unwrap().unwrap();
        assert_relative_eq!(l.upper.x1, l.lower.x1, max_relative = 1e-12);
        assert_eq!(price_limits(2.0, 3.0, k * (1.0 - 1e-9), &fees).unwrap(), None);
    }
}
