//! File formats: JSON Lines ledgers, spend-record CSV, price CSV and the
//! CSV outputs of the analyses.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! output is byte-deterministic and parses back to the same value.

mod csv_out;
mod ledger_jsonl;
mod prices;
mod records;

pub use csv_out::{
    read_dormancy_csv, write_dormancy_csv, write_max_share_csv, write_truth_csv, DORMANCY_HEADER,
    MAX_SHARE_HEADER, TRUTH_HEADER,
};
pub use ledger_jsonl::{read_ledger, stream_hash, write_ledger, LedgerReader};
pub use prices::{load_prices, save_prices, PricePoint, PRICES_HEADER};
pub use records::{read_records, write_records, RECORDS_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: transaction time {time} is earlier than the previous line's {previous}")]
    OutOfOrder { line: u64, time: i64, previous: i64 },
    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: u64, date: chrono::NaiveDate },
    #[error("line {line}: price must be positive, got {price}")]
    NonPositivePrice { line: u64, price: f64 },
}

impl IoError {
    pub(crate) fn parse(line: u64, message: impl std::fmt::Display) -> Self {
        IoError::Parse {
            line,
            message: message.to_string(),
        }
    }

    /// True for failures of the underlying reader or writer, as opposed to
    /// malformed content.
    pub fn is_io(&self) -> bool {
        match self {
            IoError::Io(_) => true,
            IoError::Parse { .. }
            | IoError::OutOfOrder { .. }
            | IoError::DuplicateDate { .. }
            | IoError::NonPositivePrice { .. } => false,
        }
    }
}

impl From<csv::Error> for IoError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => IoError::Io(io),
            kind => IoError::Parse {
                line,
                message: format!("{kind:?}"),
            },
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn check_header(got: &csv::StringRecord, want: &[&str]) -> Result<(), IoError> {
    if got.iter().map(str::trim).eq(want.iter().copied()) {
        Ok(())
    } else {
        Err(IoError::parse(
            1,
            format!("expected header {:?}, got {:?}", want.join(","), got),
        ))
    }
}

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}
