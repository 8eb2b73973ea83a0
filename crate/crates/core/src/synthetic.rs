//! Deterministic synthetic pool histories.
//!
//! An external price follows a seeded log-normal walk. Arbitrageurs pull the
//! pool back to it, noise traders pay fees in both directions, and other
//! LPs occasionally add or remove liquidity. Every event is computed on the
//! exact pool model, so the output always replays cleanly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::amm::{AmmError, ExactPool, FeeRate, Token};
use crate::ingest::{EventKind, PoolEvent};

const SECONDS_PER_DAY: i64 = 86_400;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub days: u32,
    /// UTC seconds of the bootstrap mint.
    pub start_timestamp: i64,
    /// Initial deposit on each side, in base units.
    pub initial_reserve: u128,
    pub fee: FeeRate,
    /// Standard deviation of the daily log-price change.
    pub daily_volatility: f64,
    /// Fraction of the log-price deviation from the start removed each day.
    pub mean_reversion: f64,
    pub swaps_per_day: u32,
    /// Upper bound of a noise trade relative to the input-side reserve.
    pub noise_trade_size: f64,
    /// Daily probability of a third-party mint or burn.
    pub liquidity_event_rate: f64,
    /// Emit a `sync` record ahead of every action, as pair contracts do.
    pub emit_sync: bool,
}

impl SyntheticConfig {
    /// Volatile pair with no peg.
    pub fn open_market(seed: u64, days: u32) -> Self {
        SyntheticConfig {
            seed,
            days,
            start_timestamp: 1_609_459_200, // 2021-01-01T00:00:00Z
            initial_reserve: 1_000_000_000_000_000_000_000,
            fee: FeeRate::from_ppm(3000).expect("valid fee"),
            daily_volatility: 0.04,
            mean_reversion: 0.0,
            swaps_per_day: 12,
            noise_trade_size: 0.01,
            liquidity_event_rate: 0.1,
            emit_sync: true,
        }
    }

    /// Two assets pegged to each other.
    pub fn stable(seed: u64, days: u32) -> Self {
        SyntheticConfig { daily_volatility: 0.002, mean_reversion: 0.5, ..SyntheticConfig::open_market(seed, days) }
    }
}

struct Emitter {
    events: Vec<PoolEvent>,
    block: u64,
}

impl Emitter {
    fn push(&mut self, pool_after: &ExactPool, event: PoolEvent, emit_sync: bool) {
        self.block += 1;
        let mut index = 0;
        if emit_sync {
            self.events.push(PoolEvent {
                block: self.block,
                index,
                kind: EventKind::Sync,
                amount_x_in: pool_after.reserve_x(),
                amount_x_out: 0,
                amount_y_in: pool_after.reserve_y(),
                amount_y_out: 0,
                lp_delta: 0,
                ..event
            });
            index += 1;
        }
        self.events.push(PoolEvent { block: self.block, index, ..event });
    }
}

fn blank(timestamp: i64, kind: EventKind) -> PoolEvent {
    PoolEvent {
        block: 0,
        index: 0,
        timestamp,
        kind,
        amount_x_in: 0,
        amount_x_out: 0,
        amount_y_in: 0,
        amount_y_out: 0,
        lp_delta: 0,
    }
}

fn swap_event(timestamp: i64, input: Token, amount_in: u128, amount_out: u128) -> PoolEvent {
    let mut e = blank(timestamp, EventKind::Swap);
    match input {
        Token::X => {
            e.amount_x_in = amount_in;
            e.amount_y_out = amount_out;
        }
        Token::Y => {
            e.amount_y_in = amount_in;
            e.amount_x_out = amount_out;
        }
    }
    e
}

/// Swap that brings the pool price of x (`y / x`) to `target`.
fn arbitrage_input(pool: &ExactPool, target: f64) -> (Token, u128) {
    let (x, y) = (pool.reserve_x() as f64, pool.reserve_y() as f64);
    let gamma = pool.fee().to_trading_fee().gamma();
    let k = x * y;
    let x_target = (k / target).sqrt();
    if x_target > x {
        (Token::X, ((x_target - x) / gamma) as u128)
    } else {
        (Token::Y, (((k * target).sqrt() - y).max(0.0) / gamma) as u128)
    }
}

/// Generates an event log covering `config.days` days after the bootstrap.
pub fn generate(config: &SyntheticConfig) -> Result<Vec<PoolEvent>, AmmError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shock = Normal::new(0.0, config.daily_volatility.max(0.0)).expect("finite volatility");
    let mut out = Emitter { events: Vec::new(), block: 0 };

    let seed_amount = config.initial_reserve;
    let boot = ExactPool::empty(config.fee).bootstrap(seed_amount, seed_amount)?;
    let mut pool = boot.pool_after;
    let founder_lp = boot.lp_tokens;
    let mut mint = blank(config.start_timestamp, EventKind::Mint);
    mint.amount_x_in = seed_amount;
    mint.amount_y_in = seed_amount;
    mint.lp_delta = founder_lp as i128;
    out.push(&pool, mint, config.emit_sync);

    let mut log_price = 0.0_f64;
    let slots = config.swaps_per_day.max(1) as i64;
    let slot_len = SECONDS_PER_DAY / (slots + 1);
    for day in 0..config.days as i64 {
        let previous = log_price;
        log_price = (1.0 - config.mean_reversion) * log_price + shock.sample(&mut rng);
        let day_start = config.start_timestamp + day * SECONDS_PER_DAY;

        for slot in 0..slots {
            let ts = day_start + (slot + 1) * slot_len;
            let progress = (slot + 1) as f64 / slots as f64;
            let target = (previous + (log_price - previous) * progress).exp();

            let (input, amount_in) = arbitrage_input(&pool, target);
            if amount_in > 0 {
                let q = pool.quote_exact_in(input, amount_in)?;
                if q.amount_out > 0 {
                    pool = q.pool_after;
                    out.push(&pool, swap_event(ts, input, amount_in, q.amount_out), config.emit_sync);
                }
            }

            let input = if rng.gen_bool(0.5) { Token::X } else { Token::Y };
            let size = rng.gen_range(0.0..config.noise_trade_size.max(f64::MIN_POSITIVE));
            let amount_in = (pool.reserve(input) as f64 * size) as u128;
            if amount_in > 0 {
                let q = pool.quote_exact_in(input, amount_in)?;
                if q.amount_out > 0 {
                    pool = q.pool_after;
                    out.push(&pool, swap_event(ts + 1, input, amount_in, q.amount_out), config.emit_sync);
                }
            }
        }

        if rng.gen_bool(config.liquidity_event_rate.clamp(0.0, 1.0)) {
            let ts = day_start + SECONDS_PER_DAY - 60;
            let outside = pool.lp_supply().saturating_sub(founder_lp);
            if rng.gen_bool(0.5) || outside == 0 {
                let share = rng.gen_range(0.01..0.10);
                let d = pool.mint_proportional((pool.reserve_x() as f64 * share) as u128)?;
                if d.lp_tokens > 0 {
                    pool = d.pool_after;
                    let mut e = blank(ts, EventKind::Mint);
                    e.amount_x_in = d.amount_x;
                    e.amount_y_in = d.amount_y;
                    e.lp_delta = d.lp_tokens as i128;
                    out.push(&pool, e, config.emit_sync);
                }
            } else {
                let lp = (outside as f64 * rng.gen_range(0.1..1.0)) as u128;
                let d = pool.burn(lp)?;
                if lp > 0 {
                    pool = d.pool_after;
                    let mut e = blank(ts, EventKind::Burn);
                    e.amount_x_out = d.amount_x;
                    e.amount_y_out = d.amount_y;
                    e.lp_delta = -(lp as i128);
                    out.push(&pool, e, config.emit_sync);
                }
            }
        }
    }
    Ok(out.events)
}
