use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{check_header, fmt_opt, record_line, IoError};
use crate::metrics::DormancyPoint;
use crate::synth::GroundTruth;
use crate::tail::MaxSharePoint;

pub const DORMANCY_HEADER: &[&str] = &[
    "date",
    "window_days",
    "volume_sats",
    "coin_days",
    "dormancy_days",
    "turnover_annual",
];
pub const MAX_SHARE_HEADER: &[&str] = &["date", "share", "max_txid", "total_coin_days"];
pub const TRUTH_HEADER: &[&str] = &["txid", "input_index", "true_age_days", "is_change"];

/// Undefined dormancy or turnover is written as an empty field.
pub fn write_dormancy_csv<W: Write>(writer: W, points: &[DormancyPoint]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DORMANCY_HEADER)?;
    for p in points {
        w.write_record([
            p.day.to_string(),
            p.window_days.to_string(),
            p.window_volume.sats().to_string(),
            p.window_coin_days().to_string(),
            fmt_opt(p.dormancy),
            fmt_opt(p.turnover_annual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(date, dormancy_days)` pairs from a dormancy CSV; `None` where the
/// dormancy field is empty.
pub fn read_dormancy_csv<R: Read>(reader: R) -> Result<Vec<(NaiveDate, Option<f64>)>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    check_header(rdr.headers()?, DORMANCY_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let day = NaiveDate::parse_from_str(row[0].trim(), "%Y-%m-%d")
            .map_err(|e| IoError::parse(line, format!("date {:?}: {e}", &row[0])))?;
        let raw = row.get(4).unwrap_or("").trim();
        let dormancy = if raw.is_empty() {
            None
        } else {
            Some(
                raw.parse()
                    .map_err(|e| IoError::parse(line, format!("dormancy {raw:?}: {e}")))?,
            )
        };
        out.push((day, dormancy));
    }
    Ok(out)
}

pub fn write_max_share_csv<W: Write>(writer: W, points: &[MaxSharePoint]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(MAX_SHARE_HEADER)?;
    for p in points {
        w.write_record([
            p.day.to_string(),
            fmt_opt(p.share),
            p.max_tx_id.map(|t| t.to_string()).unwrap_or_default(),
            p.total_coin_days.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_truth_csv<W: Write>(writer: W, truth: &GroundTruth) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRUTH_HEADER)?;
    for r in &truth.spends {
        w.write_record([
            r.txid.to_string(),
            r.input_index.to_string(),
            r.true_age_days().to_string(),
            r.is_change.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
