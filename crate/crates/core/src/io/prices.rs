use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{check_header, record_line, IoError};

pub const PRICES_HEADER: &[&str] = &["date", "usd_per_btc"];

/// Daily USD/BTC exchange rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PricePoint {
    pub day: NaiveDate,
    pub usd_per_btc: f64,
}

/// Load a `date,usd_per_btc` CSV. Rows may come in any order; the result is
/// sorted by date. Duplicate dates and non-positive prices are rejected.
pub fn load_prices<R: Read>(reader: R) -> Result<Vec<PricePoint>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    check_header(rdr.headers()?, PRICES_HEADER)?;
    let mut by_day = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        if row.len() != 2 {
            return Err(IoError::parse(
                line,
                format!("expected 2 columns, got {}", row.len()),
            ));
        }
        let day = NaiveDate::parse_from_str(row[0].trim(), "%Y-%m-%d")
            .map_err(|e| IoError::parse(line, format!("date {:?}: {e}", &row[0])))?;
        let usd_per_btc: f64 = row[1]
            .trim()
            .parse()
            .map_err(|e| IoError::parse(line, format!("price {:?}: {e}", &row[1])))?;
        if !(usd_per_btc.is_finite() && usd_per_btc > 0.0) {
            return Err(IoError::NonPositivePrice {
                line,
                price: usd_per_btc,
            });
        }
        if by_day.insert(day, usd_per_btc).is_some() {
            return Err(IoError::DuplicateDate { line, date: day });
        }
    }
    Ok(by_day
        .into_iter()
        .map(|(day, usd_per_btc)| PricePoint { day, usd_per_btc })
        .collect())
}

pub fn save_prices<W: Write>(writer: W, points: &[PricePoint]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PRICES_HEADER)?;
    for p in points {
        w.write_record([
            p.day.format("%Y-%m-%d").to_string(),
            p.usd_per_btc.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
