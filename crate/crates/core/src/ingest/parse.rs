use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use super::IngestError;
use crate::amm::Token;

/// Column order of an event file.
pub const EVENT_HEADER: [&str; 9] =
    ["block", "index", "timestamp", "kind", "amount_x_in", "amount_x_out", "amount_y_in", "amount_y_out", "lp_delta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Mint,
    Burn,
    Swap,
    /// Reserve resynchronisation. The new reserves are carried in
    /// `amount_x_in` and `amount_y_in`.
    Sync,
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mint" => Ok(EventKind::Mint),
            "burn" => Ok(EventKind::Burn),
            "swap" => Ok(EventKind::Swap),
            "sync" => Ok(EventKind::Sync),
            other => Err(format!("unknown event kind {other:?}")),
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Mint => "mint",
            EventKind::Burn => "burn",
            EventKind::Swap => "swap",
            EventKind::Sync => "sync",
        })
    }
}

/// One record of an exported pool log. Amounts are token base units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolEvent {
    pub block: u64,
    /// Position within the block.
    pub index: u32,
    /// UTC seconds.
    pub timestamp: i64,
    pub kind: EventKind,
    pub amount_x_in: u128,
    pub amount_x_out: u128,
    pub amount_y_in: u128,
    pub amount_y_out: u128,
    /// Liquidity tokens minted (positive) or burned (negative).
    pub lp_delta: i128,
}

impl PoolEvent {
    /// Input token of a swap.
    pub fn swap_input(&self) -> Option<Token> {
        match self.kind {
            EventKind::Swap if self.amount_x_in > 0 => Some(Token::X),
            EventKind::Swap if self.amount_y_in > 0 => Some(Token::Y),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), String> {
        let outs = (self.amount_x_out, self.amount_y_out);
        match self.kind {
            EventKind::Mint => {
                if self.amount_x_in == 0 || self.amount_y_in == 0 {
                    return Err("mint must deposit both tokens".into());
                }
                if outs != (0, 0) {
                    return Err("mint cannot carry outputs".into());
                }
                if self.lp_delta < 0 {
                    return Err("mint cannot have a negative lp_delta".into());
                }
            }
            EventKind::Burn => {
                if (self.amount_x_in, self.amount_y_in) != (0, 0) {
                    return Err("burn cannot carry inputs".into());
                }
                if self.lp_delta >= 0 {
                    return Err("burn must have a negative lp_delta".into());
                }
            }
            EventKind::Swap => {
                let x_in = self.amount_x_in > 0;
                let y_in = self.amount_y_in > 0;
                let x_out = self.amount_x_out > 0;
                let y_out = self.amount_y_out > 0;
                if x_in == y_in {
                    return Err("swap needs exactly one nonzero input side".into());
                }
                if x_out == y_out {
                    return Err("swap needs exactly one nonzero output side".into());
                }
                if x_in == x_out {
                    return Err("swap input and output must be different tokens".into());
                }
                if self.lp_delta != 0 {
                    return Err("swap cannot change lp supply".into());
                }
            }
            EventKind::Sync => {
                if outs != (0, 0) || self.lp_delta != 0 {
                    return Err("sync carries reserves in the input columns only".into());
                }
            }
        }
        Ok(())
    }
}

fn field<T: FromStr>(record: &csv::StringRecord, i: usize, line: u64) -> Result<T, IngestError>
where
    T::Err: fmt::Display,
{
    let raw = record.get(i).unwrap_or("").trim();
    raw.parse::<T>()
        .map_err(|e| IngestError::Parse { line, message: format!("column {} {raw:?}: {e}", EVENT_HEADER[i]) })
}

/// Reads an event CSV, validating every row and the strict
/// `(block, index)` ordering.
pub fn parse_events<R: Read>(source: R) -> Result<Vec<PoolEvent>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(source);
    let header = reader.headers().map_err(IngestError::from_csv)?.clone();
    if header.is_empty() {
        return Ok(Vec::new());
    }
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != EVENT_HEADER {
        return Err(IngestError::Parse {
            line: 1,
            message: format!("expected header {}, found {}", EVENT_HEADER.join(","), names.join(",")),
        });
    }

    let mut events: Vec<PoolEvent> = Vec::new();
    for result in reader.records() {
        let record = result.map_err(IngestError::from_csv)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != EVENT_HEADER.len() {
            return Err(IngestError::Parse {
                line,
                message: format!("expected {} columns, found {}", EVENT_HEADER.len(), record.len()),
            });
        }
        let event = PoolEvent {
            block: field(&record, 0, line)?,
            index: field(&record, 1, line)?,
            timestamp: field(&record, 2, line)?,
            kind: field(&record, 3, line)?,
            amount_x_in: field(&record, 4, line)?,
            amount_x_out: field(&record, 5, line)?,
            amount_y_in: field(&record, 6, line)?,
            amount_y_out: field(&record, 7, line)?,
            lp_delta: field(&record, 8, line)?,
        };
        event.validate().map_err(|message| IngestError::Parse { line, message })?;

        if let Some(prev) = events.last() {
            let key = (event.block, event.index);
            let prev_key = (prev.block, prev.index);
            if key == prev_key {
                return Err(IngestError::Order {
                    line,
                    message: format!("duplicate event at block {} index {}", event.block, event.index),
                });
            }
            if key < prev_key {
                return Err(IngestError::Order {
                    line,
                    message: format!(
                        "event at block {} index {} follows block {} index {}",
                        event.block, event.index, prev.block, prev.index
                    ),
                });
            }
            if event.timestamp < prev.timestamp {
                return Err(IngestError::Order {
                    line,
                    message: format!("timestamp {} precedes {}", event.timestamp, prev.timestamp),
                });
            }
        }
        events.push(event);
    }
    Ok(events)
}

/// Writes events in the layout read by [`parse_events`].
pub fn write_events<W: Write>(sink: W, events: &[PoolEvent]) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(EVENT_HEADER).map_err(IngestError::from_csv)?;
    for e in events {
        writer
            .write_record([
                e.block.to_string(),
                e.index.to_string(),
                e.timestamp.to_string(),
                e.kind.to_string(),
                e.amount_x_in.to_string(),
                e.amount_x_out.to_string(),
                e.amount_y_in.to_string(),
                e.amount_y_out.to_string(),
                e.lp_delta.to_string(),
            ])
            .map_err(IngestError::from_csv)?;
    }
    writer.flush()?;
    Ok(())
}
