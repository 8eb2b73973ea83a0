use primitive_types::U256;

use super::{AmmError, PoolState, Token, TradingFee};

/// Denominator of [`FeeRate`]: fees are expressed in parts per million.
pub const FEE_DENOMINATOR: u32 = 1_000_000;

/// Trading fee as an exact fraction `ppm / 1_000_000`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeeRate {
    ppm: u32,
}

impl FeeRate {
    pub fn from_ppm(ppm: u32) -> Result<Self, AmmError> {
        if ppm < FEE_DENOMINATOR {
            Ok(FeeRate { ppm })
        } else {
            Err(AmmError::InvalidFee(ppm as f64 / FEE_DENOMINATOR as f64))
        }
    }

    /// Converts a real-valued fee; it must be a whole number of ppm.
    pub fn from_trading_fee(fee: TradingFee) -> Result<Self, AmmError> {
        let scaled = fee.rho() * FEE_DENOMINATOR as f64;
        let ppm = scaled.round();
        if (scaled - ppm).abs() > 1e-6 {
            return Err(AmmError::InvalidFee(fee.rho()));
        }
        FeeRate::from_ppm(ppm as u32)
    }

    pub fn ppm(self) -> u32 {
        self.ppm
    }

    fn gamma_numerator(self) -> U256 {
        U256::from(FEE_DENOMINATOR - self.ppm)
    }

    pub fn to_trading_fee(self) -> TradingFee {
        TradingFee::new(self.ppm as f64 / FEE_DENOMINATOR as f64).expect("ppm below denominator")
    }
}

/// Pool state in token base units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactPool {
    reserve_x: u128,
    reserve_y: u128,
    lp_supply: u128,
    fee: FeeRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSwapQuote {
    pub input: Token,
    pub amount_in: u128,
    pub amount_out: u128,
    pub pool_after: ExactPool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLiquidityDelta {
    pub amount_x: u128,
    pub amount_y: u128,
    pub lp_tokens: u128,
    pub pool_after: ExactPool,
}

fn narrow(v: U256) -> Result<u128, AmmError> {
    if v > U256::from(u128::MAX) {
        Err(AmmError::Overflow)
    } else {
        Ok(v.low_u128())
    }
}

fn wide(v: u128) -> U256 {
    U256::from(v)
}

fn ceil_div(num: U256, den: U256) -> U256 {
    let (q, r) = num.div_mod(den);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn mul(a: U256, b: U256) -> Result<U256, AmmError> {
    a.checked_mul(b).ok_or(AmmError::Overflow)
}

fn add(a: u128, b: u128) -> Result<u128, AmmError> {
    a.checked_add(b).ok_or(AmmError::Overflow)
}

impl ExactPool {
    pub fn new(reserve_x: u128, reserve_y: u128, lp_supply: u128, fee: FeeRate) -> Result<Self, AmmError> {
        let live = [reserve_x > 0, reserve_y > 0, lp_supply > 0];
        if live.iter().any(|&l| l) && !live.iter().all(|&l| l) {
            return Err(AmmError::InvalidState(format!(
                "reserves ({reserve_x}, {reserve_y}) and supply {lp_supply} must be all positive or all zero"
            )));
        }
        Ok(ExactPool { reserve_x, reserve_y, lp_supply, fee })
    }

    pub fn empty(fee: FeeRate) -> Self {
        ExactPool { reserve_x: 0, reserve_y: 0, lp_supply: 0, fee }
    }

    /// First deposit; mints `floor(sqrt(amount_x * amount_y))` liquidity tokens.
    pub fn bootstrap(&self, amount_x: u128, amount_y: u128) -> Result<ExactLiquidityDelta, AmmError> {
        if !self.is_empty() {
            return Err(AmmError::AlreadyInitialized);
        }
        let lp_tokens = narrow((wide(amount_x) * wide(amount_y)).integer_sqrt())?;
        if lp_tokens == 0 {
            return Err(AmmError::InvalidState("initial deposit must be positive on both sides".into()));
        }
        Ok(ExactLiquidityDelta {
            amount_x,
            amount_y,
            lp_tokens,
            pool_after: ExactPool::new(amount_x, amount_y, lp_tokens, self.fee)?,
        })
    }

    pub fn reserve_x(&self) -> u128 {
        self.reserve_x
    }

    pub fn reserve_y(&self) -> u128 {
        self.reserve_y
    }

    pub fn reserve(&self, token: Token) -> u128 {
        match token {
            Token::X => self.reserve_x,
            Token::Y => self.reserve_y,
        }
    }

    pub fn lp_supply(&self) -> u128 {
        self.lp_supply
    }

    pub fn fee(&self) -> FeeRate {
        self.fee
    }

    pub fn k(&self) -> U256 {
        wide(self.reserve_x) * wide(self.reserve_y)
    }

    pub fn is_empty(&self) -> bool {
        self.lp_supply == 0
    }

    /// Reserves per liquidity token, `None` for an empty pool.
    pub fn normalized(&self) -> Option<(f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let lp = self.lp_supply as f64;
        Some((self.reserve_x as f64 / lp, self.reserve_y as f64 / lp))
    }

    pub fn to_analytic(&self) -> PoolState {
        PoolState::new(self.reserve_x as f64, self.reserve_y as f64, self.lp_supply as f64, self.fee.to_trading_fee())
            .expect("exact pool state is always valid")
    }

    fn require_live(&self) -> Result<(), AmmError> {
        if self.is_empty() {
            Err(AmmError::EmptyPool)
        } else {
            Ok(())
        }
    }

    fn with_sides(&self, token_a: Token, reserve_a: u128, reserve_b: u128) -> ExactPool {
        let (reserve_x, reserve_y) = match token_a {
            Token::X => (reserve_a, reserve_b),
            Token::Y => (reserve_b, reserve_a),
        };
        ExactPool { reserve_x, reserve_y, ..*self }
    }

    /// Replaces both reserves, keeping the liquidity-token supply.
    pub fn with_reserves(&self, reserve_x: u128, reserve_y: u128) -> Result<ExactPool, AmmError> {
        ExactPool::new(reserve_x, reserve_y, self.lp_supply, self.fee)
    }

    /// Output for a fixed input, rounded down.
    pub fn quote_exact_in(&self, input: Token, amount_in: u128) -> Result<ExactSwapQuote, AmmError> {
        self.require_live()?;
        let r_in = self.reserve(input);
        let r_out = self.reserve(input.other());
        let effective_in = mul(wide(amount_in), self.fee.gamma_numerator())?;
        let numerator = mul(effective_in, wide(r_out))?;
        let denominator =
            mul(wide(r_in), wide(FEE_DENOMINATOR as u128))?.checked_add(effective_in).ok_or(AmmError::Overflow)?;
        let amount_out = narrow(numerator / denominator)?;
        Ok(ExactSwapQuote {
            input,
            amount_in,
            amount_out,
            pool_after: self.with_sides(input, add(r_in, amount_in)?, r_out - amount_out),
        })
    }

    /// Input needed for a fixed output, rounded up.
    pub fn quote_exact_out(&self, output: Token, amount_out: u128) -> Result<ExactSwapQuote, AmmError> {
        self.require_live()?;
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
        let numerator = mul(mul(wide(r_in), wide(amount_out))?, wide(FEE_DENOMINATOR as u128))?;
        let denominator = mul(wide(remaining), self.fee.gamma_numerator())?;
        let amount_in = narrow(ceil_div(numerator, denominator))?;
        Ok(ExactSwapQuote {
            input,
            amount_in,
            amount_out,
            pool_after: self.with_sides(input, add(r_in, amount_in)?, remaining),
        })
    }

    /// Applies a recorded swap after checking that the pool would have
    /// released at least `amount_out` for `amount_in`.
    pub fn apply_swap(&self, input: Token, amount_in: u128, amount_out: u128) -> Result<ExactPool, AmmError> {
        let quote = self.quote_exact_in(input, amount_in)?;
        if amount_out > quote.amount_out {
            return Err(AmmError::InvariantViolation(format!(
                "{amount_in} in releases at most {} out, event records {amount_out}",
                quote.amount_out
            )));
        }
        let r_out = self.reserve(input.other());
        Ok(self.with_sides(input, quote.pool_after.reserve(input), r_out - amount_out))
    }

    /// Deposit of arbitrary amounts; liquidity is credited at the less
    /// favourable of the two ratios.
    pub fn mint(&self, amount_x: u128, amount_y: u128) -> Result<ExactLiquidityDelta, AmmError> {
        self.require_live()?;
        let supply = wide(self.lp_supply);
        let by_x = mul(wide(amount_x), supply)? / wide(self.reserve_x);
        let by_y = mul(wide(amount_y), supply)? / wide(self.reserve_y);
        let lp_tokens = narrow(by_x.min(by_y))?;
        self.apply_mint(amount_x, amount_y, lp_tokens)
    }

    /// Proportional deposit of `amount_x`; the y side is rounded up.
    pub fn mint_proportional(&self, amount_x: u128) -> Result<ExactLiquidityDelta, AmmError> {
        self.require_live()?;
        let amount_y = narrow(ceil_div(mul(wide(amount_x), wide(self.reserve_y))?, wide(self.reserve_x)))?;
        let lp_tokens = narrow(mul(wide(amount_x), wide(self.lp_supply))? / wide(self.reserve_x))?;
        self.apply_mint(amount_x, amount_y, lp_tokens)
    }

    /// Adds recorded deposit amounts and minted supply without recomputing.
    pub fn apply_mint(&self, amount_x: u128, amount_y: u128, lp_tokens: u128) -> Result<ExactLiquidityDelta, AmmError> {
        let pool_after = ExactPool::new(
            add(self.reserve_x, amount_x)?,
            add(self.reserve_y, amount_y)?,
            add(self.lp_supply, lp_tokens)?,
            self.fee,
        )?;
        Ok(ExactLiquidityDelta { amount_x, amount_y, lp_tokens, pool_after })
    }

    /// Redeems `lp_tokens` for the proportional share, rounded down.
    pub fn burn(&self, lp_tokens: u128) -> Result<ExactLiquidityDelta, AmmError> {
        if lp_tokens > self.lp_supply {
            return Err(AmmError::ExceedsSupply {
                requested: lp_tokens.to_string(),
                supply: self.lp_supply.to_string(),
            });
        }
        if lp_tokens == 0 {
            return Ok(ExactLiquidityDelta { amount_x: 0, amount_y: 0, lp_tokens, pool_after: *self });
        }
        let supply = wide(self.lp_supply);
        let amount_x = narrow(mul(wide(lp_tokens), wide(self.reserve_x))? / supply)?;
        let amount_y = narrow(mul(wide(lp_tokens), wide(self.reserve_y))? / supply)?;
        self.apply_burn(lp_tokens, amount_x, amount_y)
    }

    /// Removes recorded withdrawal amounts and burned supply.
    pub fn apply_burn(&self, lp_tokens: u128, amount_x: u128, amount_y: u128) -> Result<ExactLiquidityDelta, AmmError> {
        if lp_tokens > self.lp_supply {
            return Err(AmmError::ExceedsSupply {
                requested: lp_tokens.to_string(),
                supply: self.lp_supply.to_string(),
            });
        }
        if amount_x > self.reserve_x || amount_y > self.reserve_y {
            return Err(AmmError::InsufficientLiquidity {
                requested: format!("({amount_x}, {amount_y})"),
                reserve: format!("({}, {})", self.reserve_x, self.reserve_y),
            });
        }
        let pool_after =
            ExactPool::new(self.reserve_x - amount_x, self.reserve_y - amount_y, self.lp_supply - lp_tokens, self.fee)?;
        Ok(ExactLiquidityDelta { amount_x, amount_y, lp_tokens, pool_after })
    }
}
