//! Constant-product pool state machine.
//!
//! Two numeric backends share the same semantics:
//!
//! * [`PoolState`] works in `f64` and follows the closed-form reserve updates
//!   directly. Frontier analytics and property checks use it.
//! * [`ExactPool`] works in token base units (`u128` reserves, 256-bit
//!   intermediates) and rounds every result in the pool's favour, the way a
//!   deployed pair contract does. Event replay runs on this path.

mod analytic;
mod exact;

pub use analytic::{LiquidityDelta, PoolState, SwapQuote};
pub use exact::{ExactLiquidityDelta, ExactPool, ExactSwapQuote, FeeRate, FEE_DENOMINATOR};

use thiserror::Error;

/// One of the two pool assets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    X,
    Y,
}

impl Token {
    pub fn other(self) -> Token {
        match self {
            Token::X => Token::Y,
            Token::Y => Token::X,
        }
    }
}

/// Per-swap trading fee `rho` in `[0, 1)`; `gamma = 1 - rho` is the share of
/// the input that moves the price.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TradingFee(f64);

impl TradingFee {
    /// 30 bp, the fee charged by Uniswap V2 pairs.
    pub const DEFAULT: TradingFee = TradingFee(0.003);
    pub const ZERO: TradingFee = TradingFee(0.0);

    pub fn new(rho: f64) -> Result<Self, AmmError> {
        if rho.is_finite() && (0.0..1.0).contains(&rho) {
            Ok(TradingFee(rho))
        } else {
            Err(AmmError::InvalidFee(rho))
        }
    }

    pub fn rho(self) -> f64 {
        self.0
    }

    pub fn gamma(self) -> f64 {
        1.0 - self.0
    }
}

impl Default for TradingFee {
    fn default() -> Self {
        TradingFee::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmmError {
    #[error("pool has no liquidity")]
    EmptyPool,
    #[error("pool already holds liquidity; use mint instead of bootstrap")]
    AlreadyInitialized,
    #[error("amount must be finite and non-negative, got {0}")]
    NegativeAmount(f64),
    #[error("trading fee must lie in [0, 1), got {0}")]
    InvalidFee(f64),
    #[error("requested output {requested} would deplete reserve {reserve}")]
    InsufficientLiquidity { requested: String, reserve: String },
    #[error("cannot burn {requested} liquidity tokens, supply is {supply}")]
    ExceedsSupply { requested: String, supply: String },
    #[error("invalid pool state: {0}")]
    InvalidState(String),
    #[error("swap breaks the constant-product invariant: {0}")]
    InvariantViolation(String),
    #[error("arithmetic overflow")]
    Overflow,
}
