use std::io::{Read, Write};

use chrono::{DateTime, NaiveDate, NaiveTime};

use super::{IngestError, ReplayPoint};

pub const SNAPSHOT_HEADER: [&str; 6] = ["date", "reserve_x", "reserve_y", "lp_supply", "norm_x", "norm_y"];

/// Pool state observed at noon UTC on `date`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolSnapshot {
    pub date: NaiveDate,
    pub reserve_x: u128,
    pub reserve_y: u128,
    pub lp_supply: u128,
    /// Reserves per liquidity token.
    pub normalized_x: f64,
    pub normalized_y: f64,
}

fn date_of(timestamp: i64) -> Option<NaiveDate> {
    DateTime::from_timestamp(timestamp, 0).map(|t| t.date_naive())
}

fn noon(date: NaiveDate) -> i64 {
    date.and_time(NaiveTime::from_hms_opt(12, 0, 0).expect("valid time")).and_utc().timestamp()
}

/// One snapshot per calendar day holding the latest state at or before
/// 12:00:00 UTC. Days before the first event and days on which the pool
/// is empty are skipped; quiet days carry the previous state forward.
pub fn daily_snapshots(series: &[ReplayPoint]) -> Vec<PoolSnapshot> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Vec::new(),
    };
    let (Some(start), Some(end)) = (date_of(first.timestamp), date_of(last.timestamp)) else {
        return Vec::new();
    };

    let mut out = Vec::new();
    let mut cursor = 0;
    let mut current: Option<&ReplayPoint> = None;
    for date in start.iter_days().take_while(|d| *d <= end) {
        let cutoff = noon(date);
        while cursor < series.len() && series[cursor].timestamp <= cutoff {
            current = Some(&series[cursor]);
            cursor += 1;
        }
        let Some(point) = current else { continue };
        let Some((normalized_x, normalized_y)) = point.pool.normalized() else { continue };
        out.push(PoolSnapshot {
            date,
            reserve_x: point.pool.reserve_x(),
            reserve_y: point.pool.reserve_y(),
            lp_supply: point.pool.lp_supply(),
            normalized_x,
            normalized_y,
        });
    }
    out
}

pub fn write_snapshots<W: Write>(sink: W, snapshots: &[PoolSnapshot]) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(SNAPSHOT_HEADER).map_err(IngestError::from_csv)?;
    for s in snapshots {
        writer
            .write_record([
                s.date.format("%Y-%m-%d").to_string(),
                s.reserve_x.to_string(),
                s.reserve_y.to_string(),
                s.lp_supply.to_string(),
                s.normalized_x.to_string(),
                s.normalized_y.to_string(),
            ])
            .map_err(IngestError::from_csv)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a file written by [`write_snapshots`]. Normalized values are taken
/// as written.
pub fn read_snapshots<R: Read>(source: R) -> Result<Vec<PoolSnapshot>, IngestError> {
    let mut reader = csv::Reader::from_reader(source);
    let header = reader.headers().map_err(IngestError::from_csv)?.clone();
    if header.iter().map(str::trim).ne(SNAPSHOT_HEADER) {
        return Err(IngestError::Parse { line: 1, message: format!("expected header {}", SNAPSHOT_HEADER.join(",")) });
    }
    let mut out: Vec<PoolSnapshot> = Vec::new();
    for result in reader.records() {
        let record = result.map_err(IngestError::from_csv)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad =
            |col: &str, e: &dyn std::fmt::Display| IngestError::Parse { line, message: format!("column {col}: {e}") };
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| bad("date", &e))?;
        let reserve_x = record[1].parse().map_err(|e| bad("reserve_x", &e))?;
        let reserve_y = record[2].parse().map_err(|e| bad("reserve_y", &e))?;
        let lp_supply: u128 = record[3].parse().map_err(|e| bad("lp_supply", &e))?;
        let normalized_x: f64 = record[4].parse().map_err(|e| bad("norm_x", &e))?;
        let normalized_y: f64 = record[5].parse().map_err(|e| bad("norm_y", &e))?;
        if lp_supply == 0 || !(normalized_x > 0.0 && normalized_y > 0.0) {
            return Err(IngestError::Parse { line, message: "snapshot of an empty pool".into() });
        }
        if out.last().is_some_and(|prev| prev.date >= date) {
            return Err(IngestError::Order { line, message: format!("date {date} is not after the previous row") });
        }
        out.push(PoolSnapshot { date, reserve_x, reserve_y, lp_supply, normalized_x, normalized_y });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amm::{ExactPool, FeeRate};

    fn at(date: &str, hms: (u32, u32, u32)) -> i64 {
        NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .unwrap()
            .and_hms_opt(hms.0, hms.1, hms.2)
            .unwrap()
            .and_utc()
            .timestamp()
    }

    fn point(ts: i64, x: u128, y: u128, lp: u128) -> ReplayPoint {
        ReplayPoint {
            block: 0,
            index: 0,
            timestamp: ts,
            pool: ExactPool::new(x, y, lp, FeeRate::from_ppm(0).unwrap()).unwrap(),
        }
    }

    #[test]
    fn single_morning_event() {
        let snaps = daily_snapshots(&[point(at("2021-03-01", (11, 0, 0)), 100, 200, 50)]);
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].date.to_string(), "2021-03-01");
        assert_eq!((snaps[0].normalized_x, snaps[0].normalized_y), (2.0, 4.0));
    }

    #[test]
    fn noon_cutoff() {
        let snaps = daily_snapshots(&[
            point(at("2021-03-01", (11, 0, 0)), 100, 100, 100),
            point(at("2021-03-01", (12, 0, 0)), 110, 100, 100),
            point(at("2021-03-01", (13, 0, 0)), 120, 100, 100),
        ]);
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].reserve_x, 110);
    }

    #[test]
    fn afternoon_first_event_skips_its_day() {
        let snaps = daily_snapshots(&[point(at("2021-03-01", (13, 0, 0)), 100, 100, 100)]);
        assert!(snaps.is_empty());
    }

    #[test]
    fn quiet_days_carry_forward() {
        let snaps = daily_snapshots(&[
            point(at("2021-03-01", (9, 0, 0)), 100, 100, 100),
            point(at("2021-03-01", (18, 0, 0)), 130, 100, 100),
            point(at("2021-03-04", (6, 0, 0)), 140, 100, 100),
        ]);
        let xs: Vec<_> = snaps.iter().map(|s| (s.date.to_string(), s.reserve_x)).collect();
        assert_eq!(
            xs,
            [
                ("2021-03-01".into(), 100),
                ("2021-03-02".into(), 130),
                ("2021-03-03".into(), 130),
                ("2021-03-04".into(), 140)
            ]
        );
    }

    #[test]
    fn empty_pool_days_are_omitted() {
        let snaps = daily_snapshots(&[
            point(at("2021-03-01", (9, 0, 0)), 100, 100, 100),
            point(at("2021-03-01", (18, 0, 0)), 0, 0, 0),
            point(at("2021-03-03", (6, 0, 0)), 50, 50, 50),
        ]);
        let dates: Vec<_> = snaps.iter().map(|s| s.date.to_string()).collect();
        assert_eq!(dates, ["2021-03-01", "2021-03-03"]);
    }

    #[test]
    fn csv_round_trip() {
        let snaps = daily_snapshots(&[
            point(at("2021-03-01", (9, 0, 0)), 1_000_000_007, 3, 7),
            point(at("2021-03-02", (9, 0, 0)), 10, 30, 9),
        ]);
        let mut buf = Vec::new();
        write_snapshots(&mut buf, &snaps).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("date,reserve_x,reserve_y,lp_supply,norm_x,norm_y\n2021-03-01,1000000007,3,7,"));
        assert_eq!(read_snapshots(buf.as_slice()).unwrap(), snaps);
    }
}
