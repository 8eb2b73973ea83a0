use super::{AmmError, Token, TradingFee};

/// Real-valued pool state: reserves, liquidity-token supply and trading fee.
///
/// The invariant `k` is always derived from the reserves. Either all three
/// quantities are positive or all are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolState {
    reserve_x: f64,
    reserve_y: f64,
    lp_supply: f64,
    fee: TradingFee,
}

/// Result of quoting a swap against a [`PoolState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapQuote {
    pub input: Token,
    pub amount_in: f64,
    pub amount_out: f64,
    /// Input relative to the input-side reserve (`alpha` for x, `beta` for y).
    pub relative_input: f64,
    pub pool_after: PoolState,
}

/// A proportional deposit or withdrawal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiquidityDelta {
    pub amount_x: f64,
    pub amount_y: f64,
    pub lp_tokens: f64,
    /// Fraction of the pre-action reserves that moved: growth factor for a
    /// mint, redeemed share for a burn.
    pub phi: f64,
    pub pool_after: PoolState,
}

fn check_amount(amount: f64) -> Result<f64, AmmError> {
    if amount.is_finite() && amount >= 0.0 {
        Ok(amount)
    } else {
        Err(AmmError::NegativeAmount(amount))
    }
}

impl PoolState {
    pub fn new(reserve_x: f64, reserve_y: f64, lp_supply: f64, fee: TradingFee) -> Result<Self, AmmError> {
        for v in [reserve_x, reserve_y, lp_supply] {
            check_amount(v)?;
        }
        let live = [reserve_x > 0.0, reserve_y > 0.0, lp_supply > 0.0];
        if live.iter().any(|&l| l) && !live.iter().all(|&l| l) {
            return Err(AmmError::InvalidState(format!(
                "reserves ({reserve_x}, {reserve_y}) and supply {lp_supply} must be all positive or all zero"
            )));
        }
        Ok(PoolState { reserve_x, reserve_y, lp_supply, fee })
    }

    pub fn empty(fee: TradingFee) -> Self {
        PoolState { reserve_x: 0.0, reserve_y: 0.0, lp_supply: 0.0, fee }
    }

    /// First deposit into an empty pool. The depositor receives
    /// `sqrt(amount_x * amount_y)` liquidity tokens.
    pub fn bootstrap(amount_x: f64, amount_y: f64, fee: TradingFee) -> Result<LiquidityDelta, AmmError> {
        check_amount(amount_x)?;
        check_amount(amount_y)?;
        if amount_x == 0.0 || amount_y == 0.0 {
            return Err(AmmError::InvalidState("initial deposit must be positive on both sides".into()));
        }
        let lp_tokens = (amount_x * amount_y).sqrt();
        Ok(LiquidityDelta {
            amount_x,
            amount_y,
            lp_tokens,
            phi: f64::INFINITY,
            pool_after: PoolState::new(amount_x, amount_y, lp_tokens, fee)?,
        })
    }

    pub fn reserve_x(&self) -> f64 {
        self.reserve_x
    }

    pub fn reserve_y(&self) -> f64 {
        self.reserve_y
    }

    pub fn reserve(&self, token: Token) -> f64 {
        match token {
            Token::X => self.reserve_x,
            Token::Y => self.reserve_y,
        }
    }

    pub fn lp_supply(&self) -> f64 {
        self.lp_supply
    }

    pub fn fee(&self) -> TradingFee {
        self.fee
    }

    pub fn k(&self) -> f64 {
        self.reserve_x * self.reserve_y
    }

    pub fn is_empty(&self) -> bool {
        self.lp_supply == 0.0
    }

    fn require_live(&self) -> Result<(), AmmError> {
        if self.is_empty() {
            Err(AmmError::EmptyPool)
        } else {
            Ok(())
        }
    }

    fn with_reserves(&self, token_a: Token, reserve_a: f64, reserve_b: f64) -> PoolState {
        let (reserve_x, reserve_y) = match token_a {
            Token::X => (reserve_a, reserve_b),
            Token::Y => (reserve_b, reserve_a),
        };
        PoolState { reserve_x, reserve_y, ..*self }
    }

    /// Marginal price of `of` in units of the other token: `y/x` for x,
    /// `x/y` for y.
    pub fn spot_price(&self, of: Token) -> Result<f64, AmmError> {
        self.require_live()?;
        Ok(self.reserve(of.other()) / self.reserve(of))
    }

    /// Output received for a fixed input: `out = a*g / (1 + a*g) * R_out`
    /// with `a = amount_in / R_in`.
    pub fn quote_swap_exact_in(&self, input: Token, amount_in: f64) -> Result<SwapQuote, AmmError> {
        self.require_live()?;
        check_amount(amount_in)?;
        let r_in = self.reserve(input);
        let r_out = self.reserve(input.other());
        let relative_input = amount_in / r_in;
        let effective = relative_input * self.fee.gamma();
        let amount_out = effective / (1.0 + effective) * r_out;
        Ok(SwapQuote {
            input,
            amount_in,
            amount_out,
            relative_input,
            pool_after: self.with_reserves(input, r_in + amount_in, r_out - amount_out),
        })
    }

    /// Input required to receive exactly `amount_out` of `output`.
    pub fn quote_swap_exact_out(&self, output: Token, amount_out: f64) -> Result<SwapQuote, AmmError> {
        self.require_live()?;
        check_amount(amount_out)?;
        let input = output.other();
        let r_in = self.reserve(input);
        let r_out = self.reserve(output);
        if amount_out >= r_out {
            return Err(AmmError::InsufficientLiquidity {
                requested: amount_out.to_string(),
                reserve: r_out.to_string(),
            });
        }
        let remaining = r_out - amount_out;
        let amount_in = r_in * amount_out / (remaining * self.fee.gamma());
        Ok(SwapQuote {
            input,
            amount_in,
            amount_out,
            relative_input: amount_in / r_in,
            pool_after: self.with_reserves(input, r_in + amount_in, remaining),
        })
    }

    /// Proportional deposit of `amount_x`; the matching y amount is
    /// `amount_x * y / x` and both reserves grow by `1 + phi`.
    pub fn mint(&self, amount_x: f64) -> Result<LiquidityDelta, AmmError> {
        check_amount(amount_x)?;
        self.require_live()?;
        let phi = amount_x / self.reserve_x;
        let amount_y = phi * self.reserve_y;
        let lp_tokens = phi * self.lp_supply;
        Ok(LiquidityDelta {
            amount_x,
            amount_y,
            lp_tokens,
            phi,
            pool_after: PoolState {
                reserve_x: self.reserve_x + amount_x,
                reserve_y: self.reserve_y + amount_y,
                lp_supply: self.lp_supply + lp_tokens,
                fee: self.fee,
            },
        })
    }

    /// Redeem `lp_tokens` for the matching share of both reserves.
    pub fn burn(&self, lp_tokens: f64) -> Result<LiquidityDelta, AmmError> {
        check_amount(lp_tokens)?;
        if lp_tokens > self.lp_supply {
            return Err(AmmError::ExceedsSupply {
                requested: lp_tokens.to_string(),
                supply: self.lp_supply.to_string(),
            });
        }
        if lp_tokens == 0.0 {
            return Ok(LiquidityDelta { amount_x: 0.0, amount_y: 0.0, lp_tokens, phi: 0.0, pool_after: *self });
        }
        if lp_tokens == self.lp_supply {
            return Ok(LiquidityDelta {
                amount_x: self.reserve_x,
                amount_y: self.reserve_y,
                lp_tokens,
                phi: 1.0,
                pool_after: PoolState::empty(self.fee),
            });
        }
        let share = lp_tokens / self.lp_supply;
        let amount_x = share * self.reserve_x;
        let amount_y = share * self.reserve_y;
        Ok(LiquidityDelta {
            amount_x,
            amount_y,
            lp_tokens,
            phi: share,
            pool_after: PoolState {
                reserve_x: self.reserve_x - amount_x,
                reserve_y: self.reserve_y - amount_y,
                lp_supply: self.lp_supply - lp_tokens,
                fee: self.fee,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pool(x: f64, y: f64, lp: f64, rho: f64) -> PoolState {
        PoolState::new(x, y, lp, TradingFee::new(rho).unwrap()).unwrap()
    }

    #[test]
    fn spot_prices() {
        assert_eq!(pool(100.0, 100.0, 100.0, 0.0).spot_price(Token::X).unwrap(), 1.0);
        let p = pool(2.0, 8.0, 4.0, 0.0);
        assert_eq!(p.spot_price(Token::X).unwrap(), 4.0);
        assert_eq!(p.spot_price(Token::Y).unwrap(), 0.25);
        assert_eq!(p.spot_price(Token::X).unwrap() * p.spot_price(Token::Y).unwrap(), 1.0);
        assert_eq!(PoolState::empty(TradingFee::ZERO).spot_price(Token::X), Err(AmmError::EmptyPool));
    }

    #[test]
    fn feeless_swap_matches_brute_force_invariant_solve() {
        // Solve (100 + 10) * (100 - dy) = 10_000 for dy by bisection.
        let (mut lo, mut hi) = (0.0_f64, 100.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 110.0 * (100.0 - mid) > 10_000.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = pool(100.0, 100.0, 100.0, 0.0).quote_swap_exact_in(Token::X, 10.0).unwrap();
        assert_relative_eq!(q.amount_out, lo, max_relative = 1e-12);
        assert_relative_eq!(q.amount_out, 100.0 / 11.0, max_relative = 1e-15);
        assert_relative_eq!(q.pool_after.reserve_x(), 110.0);
        assert_relative_eq!(q.pool_after.reserve_y(), 1000.0 / 11.0, max_relative = 1e-15);
        assert_relative_eq!(q.pool_after.k(), 10_000.0, max_relative = 1e-12);
        assert_relative_eq!(q.relative_input, 0.1);
    }

    #[test]
    fn fee_swap_output() {
        let q = pool(100.0, 100.0, 100.0, 0.003).quote_swap_exact_in(Token::X, 10.0).unwrap();
        assert_relative_eq!(q.amount_out, 100.0 * 0.0997 / 1.0997, max_relative = 1e-14);
        assert!((q.amount_out - 9.06611).abs() < 1e-5);
        assert!(q.pool_after.k() > 10_000.0);
    }

    #[test]
    fn zero_input_is_a_no_op() {
        let p = pool(37.0, 91.0, 12.0, 0.003);
        let q = p.quote_swap_exact_in(Token::Y, 0.0).unwrap();
        assert_eq!(q.amount_out, 0.0);
        assert_eq!(q.pool_after, p);
    }

    #[test]
    fn swap_rejects_bad_input() {
        let p = pool(1.0, 1.0, 1.0, 0.0);
        assert!(matches!(p.quote_swap_exact_in(Token::X, -1.0), Err(AmmError::NegativeAmount(_))));
        assert_eq!(PoolState::empty(TradingFee::ZERO).quote_swap_exact_in(Token::X, 1.0), Err(AmmError::EmptyPool));
    }

    #[test]
    fn exact_out_inverts_exact_in() {
        let p = pool(100.0, 100.0, 100.0, 0.0);
        let q = p.quote_swap_exact_out(Token::Y, 100.0 / 11.0).unwrap();
        assert!((q.amount_in - 10.0).abs() < 1e-9);
        assert_eq!(p.quote_swap_exact_out(Token::Y, 0.0).unwrap().amount_in, 0.0);
        assert!(matches!(p.quote_swap_exact_out(Token::Y, 100.0), Err(AmmError::InsufficientLiquidity { .. })));
    }

    #[test]
    fn mint_examples() {
        let p = pool(100.0, 100.0, 100.0, 0.0);
        let d = p.mint(10.0).unwrap();
        assert_eq!(d.amount_y, 10.0);
        assert_relative_eq!(d.phi, 0.1);
        assert_relative_eq!(d.lp_tokens, 10.0);
        assert_relative_eq!(d.pool_after.k(), 12_100.0, max_relative = 1e-15);

        let d = p.mint(5.0).unwrap();
        assert_relative_eq!(d.pool_after.k(), 1.05f64.powi(2) * 10_000.0, max_relative = 1e-15);
        assert_relative_eq!(d.pool_after.k(), 11_025.0, max_relative = 1e-15);

        let d = p.mint(0.0).unwrap();
        assert_eq!(d.lp_tokens, 0.0);
        assert_eq!(d.pool_after, p);

        assert!(matches!(p.mint(-1.0), Err(AmmError::NegativeAmount(_))));
    }

    #[test]
    fn burn_examples() {
        let p = pool(110.0, 110.0, 110.0, 0.0);
        let d = p.burn(10.0).unwrap();
        assert_relative_eq!(d.amount_x, 10.0);
        assert_relative_eq!(d.amount_y, 10.0);
        assert_relative_eq!(d.pool_after.reserve_x(), 100.0);
        assert_relative_eq!(d.pool_after.lp_supply(), 100.0);

        let d = p.burn(0.0).unwrap();
        assert_eq!((d.amount_x, d.amount_y), (0.0, 0.0));

        let p = pool(100.0, 100.0, 100.0, 0.0);
        let d = p.burn(100.0).unwrap();
        assert_eq!((d.amount_x, d.amount_y), (100.0, 100.0));
        assert!(d.pool_after.is_empty());

        assert!(matches!(p.burn(100.5), Err(AmmError::ExceedsSupply { .. })));
    }

    #[test]
    fn bootstrap_uses_geometric_mean() {
        let d = PoolState::bootstrap(100.0, 100.0, TradingFee::DEFAULT).unwrap();
        assert_eq!(d.lp_tokens, 100.0);
        let d = PoolState::bootstrap(2.0, 8.0, TradingFee::DEFAULT).unwrap();
        assert_eq!(d.lp_tokens, 4.0);
        assert!(PoolState::bootstrap(0.0, 8.0, TradingFee::DEFAULT).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(PoolState::new(1.0, 0.0, 1.0, TradingFee::ZERO).is_err());
        assert!(PoolState::new(f64::NAN, 1.0, 1.0, TradingFee::ZERO).is_err());
        assert!(PoolState::new(0.0, 0.0, 0.0, TradingFee::ZERO).is_ok());
        assert!(TradingFee::new(1.0).is_err());
        assert!(TradingFee::new(-0.1).is_err());
        assert_eq!(TradingFee::default().rho(), 0.003);
    }
}
