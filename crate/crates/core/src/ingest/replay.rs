use log::{debug, warn};

use super::{EventKind, IngestError, PoolEvent};
use crate::amm::{AmmError, ExactPool, FeeRate, Token};

/// Pool state right after one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayPoint {
    pub block: u64,
    pub index: u32,
    pub timestamp: i64,
    pub pool: ExactPool,
}

/// Pair contracts emit `Sync` immediately before the mint, burn or swap that
/// produced the new reserves. Such a sync describes the state after the next
/// event rather than before it.
fn is_paired_sync(events: &[PoolEvent], i: usize) -> bool {
    let (sync, next) = match (events.get(i), events.get(i + 1)) {
        (Some(s), Some(n)) => (s, n),
        _ => return false,
    };
    sync.kind == EventKind::Sync
        && next.kind != EventKind::Sync
        && next.block == sync.block
        && next.index == sync.index + 1
}

fn apply(pool: &ExactPool, event: &PoolEvent) -> Result<ExactPool, AmmError> {
    match event.kind {
        EventKind::Mint => {
            let (ax, ay) = (event.amount_x_in, event.amount_y_in);
            let recorded = u128::try_from(event.lp_delta).map_err(|_| AmmError::Overflow)?;
            if pool.is_empty() {
                if recorded == 0 {
                    return Ok(pool.bootstrap(ax, ay)?.pool_after);
                }
                return ExactPool::new(ax, ay, recorded, pool.fee());
            }
            if recorded == 0 {
                return Ok(pool.mint(ax, ay)?.pool_after);
            }
            Ok(pool.apply_mint(ax, ay, recorded)?.pool_after)
        }
        EventKind::Burn => {
            let lp = u128::try_from(-event.lp_delta).map_err(|_| AmmError::Overflow)?;
            if (event.amount_x_out, event.amount_y_out) == (0, 0) {
                Ok(pool.burn(lp)?.pool_after)
            } else {
                Ok(pool.apply_burn(lp, event.amount_x_out, event.amount_y_out)?.pool_after)
            }
        }
        EventKind::Swap => {
            let (input, amount_in, amount_out) = match event.swap_input() {
                Some(Token::X) => (Token::X, event.amount_x_in, event.amount_y_out),
                _ => (Token::Y, event.amount_y_in, event.amount_x_out),
            };
            pool.apply_swap(input, amount_in, amount_out)
        }
        EventKind::Sync => pool.with_reserves(event.amount_x_in, event.amount_y_in),
    }
}

fn resync(pool: ExactPool, sync: &PoolEvent) -> Result<ExactPool, AmmError> {
    let target = (sync.amount_x_in, sync.amount_y_in);
    let computed = (pool.reserve_x(), pool.reserve_y());
    if computed == target {
        return Ok(pool);
    }
    warn!(
        "sync at block {} index {} sets reserves {:?}, replay computed {:?}",
        sync.block, sync.index, target, computed
    );
    pool.with_reserves(target.0, target.1)
}

/// Replays `events` from an empty pool and returns the state after every
/// event, one point per event.
///
/// The first action must be a mint. A sync overrides computed reserves; when
/// it directly precedes its action in the same block it is checked against
/// the state after that action.
pub fn replay(events: &[PoolEvent], fee: FeeRate) -> Result<Vec<ReplayPoint>, IngestError> {
    let mut pool = ExactPool::empty(fee);
    let mut points = Vec::with_capacity(events.len());
    let mut pending_sync: Option<&PoolEvent> = None;

    for (i, event) in events.iter().enumerate() {
        let fail = |source: AmmError| IngestError::Replay { index: i, block: event.block, source };
        if pool.is_empty() && !matches!(event.kind, EventKind::Mint) && !is_paired_sync(events, i) {
            return Err(fail(AmmError::EmptyPool));
        }

        if is_paired_sync(events, i) {
            pending_sync = Some(event);
        } else {
            pool = apply(&pool, event).map_err(fail)?;
            if let Some(sync) = pending_sync.take() {
                pool = resync(pool, sync).map_err(fail)?;
            }
        }
        debug!("event {i} {} -> ({}, {}, {})", event.kind, pool.reserve_x(), pool.reserve_y(), pool.lp_supply());
        points.push(ReplayPoint { block: event.block, index: event.index, timestamp: event.timestamp, pool });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(block: u64, index: u32, kind: EventKind, amounts: [u128; 4], lp_delta: i128) -> PoolEvent {
        PoolEvent {
            block,
            index,
            timestamp: block as i64 * 12,
            kind,
            amount_x_in: amounts[0],
            amount_x_out: amounts[1],
            amount_y_in: amounts[2],
            amount_y_out: amounts[3],
            lp_delta,
        }
    }

    fn fee() -> FeeRate {
        FeeRate::from_ppm(3000).unwrap()
    }

    #[test]
    fn bootstrap_mint() {
        let pts = replay(&[ev(1, 0, EventKind::Mint, [100, 0, 100, 0], 0)], fee()).unwrap();
        let p = pts[0].pool;
        assert_eq!((p.reserve_x(), p.reserve_y(), p.lp_supply()), (100, 100, 100));
    }

    #[test]
    fn mint_swap_burn() {
        let events = [
            ev(1, 0, EventKind::Mint, [100, 0, 100, 0], 100),
            ev(2, 0, EventKind::Swap, [10, 0, 0, 9], 0),
            ev(3, 0, EventKind::Burn, [0, 0, 0, 0], -100),
        ];
        let pts = replay(&events, fee()).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!((pts[1].pool.reserve_x(), pts[1].pool.reserve_y()), (110, 91));
        assert!(pts[2].pool.is_empty());
        assert_eq!(pts[2].pool.reserve_x(), 0);
    }

    #[test]
    fn first_event_must_be_mint() {
        let events = [ev(1, 0, EventKind::Swap, [10, 0, 0, 9], 0)];
        assert!(matches!(replay(&events, fee()), Err(IngestError::Replay { index: 0, .. })));
    }

    #[test]
    fn overdrawn_swap_is_rejected_at_its_index() {
        let events = [ev(1, 0, EventKind::Mint, [100, 0, 100, 0], 0), ev(2, 0, EventKind::Swap, [10, 0, 0, 10], 0)];
        match replay(&events, fee()) {
            Err(IngestError::Replay { index, block, .. }) => assert_eq!((index, block), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
        let events = [ev(1, 0, EventKind::Mint, [100, 0, 100, 0], 0), ev(2, 0, EventKind::Burn, [0, 0, 0, 0], -101)];
        assert!(matches!(replay(&events, fee()), Err(IngestError::Replay { index: 1, .. })));
    }

    #[test]
    fn standalone_sync_overrides_reserves() {
        let events = [ev(1, 0, EventKind::Mint, [100, 0, 100, 0], 0), ev(2, 0, EventKind::Sync, [105, 0, 100, 0], 0)];
        let pts = replay(&events, fee()).unwrap();
        assert_eq!((pts[1].pool.reserve_x(), pts[1].pool.reserve_y(), pts[1].pool.lp_supply()), (105, 100, 100));
    }

    #[test]
    fn paired_sync_checks_the_following_action() {
        // Contract order: Sync(post-state) then Mint / Swap in the same block.
        let events = [
            ev(1, 3, EventKind::Sync, [100, 0, 100, 0], 0),
            ev(1, 4, EventKind::Mint, [100, 0, 100, 0], 0),
            ev(2, 0, EventKind::Sync, [110, 0, 91, 0], 0),
            ev(2, 1, EventKind::Swap, [10, 0, 0, 9], 0),
        ];
        let pts = replay(&events, fee()).unwrap();
        assert!(pts[0].pool.is_empty());
        assert_eq!((pts[1].pool.reserve_x(), pts[1].pool.reserve_y()), (100, 100));
        assert_eq!((pts[2].pool.reserve_x(), pts[2].pool.reserve_y()), (100, 100));
        assert_eq!((pts[3].pool.reserve_x(), pts[3].pool.reserve_y()), (110, 91));

        // A donation shows up as a sync that disagrees with the action.
        let events = [
            ev(1, 0, EventKind::Mint, [100, 0, 100, 0], 0),
            ev(2, 0, EventKind::Sync, [115, 0, 91, 0], 0),
            ev(2, 1, EventKind::Swap, [10, 0, 0, 9], 0),
        ];
        let pts = replay(&events, fee()).unwrap();
        assert_eq!((pts[2].pool.reserve_x(), pts[2].pool.reserve_y()), (115, 91));
    }
}
