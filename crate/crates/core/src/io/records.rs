//! Spend-record CSV: one row per transaction. The `inputs` column lists the
//! destroyed coins as `sats@created_unix` joined by `;`, which lets
//! downstream tools recompute coin-days under either age mode.

use std::io::{Read, Write};

use super::{check_header, record_line, IoError};
use crate::ledger::{Amount, SpendRecord, SpentInput, Timestamp, Txid};

pub const RECORDS_HEADER: &[&str] = &[
    "txid",
    "time",
    "coinbase",
    "volume_sats",
    "change_sats",
    "sat_seconds",
    "coin_days",
    "inputs",
];

pub fn write_records<W: Write>(writer: W, records: &[SpendRecord]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        let inputs = r
            .inputs
            .iter()
            .map(|i| format!("{}@{}", i.amount.sats(), i.created_at.unix_seconds()))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.txid.to_string(),
            r.time.unix_seconds().to_string(),
            r.coinbase.to_string(),
            r.volume_destroyed.sats().to_string(),
            r.change.sats().to_string(),
            r.sat_seconds.to_string(),
            r.coin_days().to_string(),
            inputs,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, line: u64) -> Result<T, IoError>
where
    T::Err: std::fmt::Display,
{
    let raw = rec
        .get(idx)
        .ok_or_else(|| IoError::parse(line, "missing column"))?;
    raw.trim()
        .parse()
        .map_err(|e| IoError::parse(line, format!("column {}: {e}", RECORDS_HEADER[idx])))
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<SpendRecord>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    check_header(rdr.headers()?, RECORDS_HEADER)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = record_line(&row);
        let txid: Txid = field(&row, 0, line)?;
        let time = Timestamp::from_unix(field(&row, 1, line)?);
        let inputs_raw = row.get(7).unwrap_or("").trim();
        let inputs = if inputs_raw.is_empty() {
            Vec::new()
        } else {
            inputs_raw
                .split(';')
                .map(|part| {
                    let (sats, created) = part
                        .split_once('@')
                        .ok_or_else(|| IoError::parse(line, format!("bad input {part:?}")))?;
                    let bad = |_| IoError::parse(line, format!("bad input {part:?}"));
                    Ok(SpentInput {
                        amount: Amount::from_sats(sats.parse().map_err(bad)?),
                        created_at: Timestamp::from_unix(created.parse().map_err(bad)?),
                    })
                })
                .collect::<Result<Vec<_>, IoError>>()?
        };
        let rec = SpendRecord {
            txid,
            time,
            coinbase: field(&row, 2, line)?,
            volume_destroyed: Amount::from_sats(field(&row, 3, line)?),
            change: Amount::from_sats(field(&row, 4, line)?),
            sat_seconds: field(&row, 5, line)?,
            inputs,
        };
        let listed: u64 = rec.inputs.iter().map(|i| i.amount.sats()).sum();
        if listed != rec.volume_destroyed.sats() {
            return Err(IoError::parse(line, "inputs do not sum to volume_sats"));
        }
        if out.last().is_some_and(|p: &SpendRecord| p.time > rec.time) {
            return Err(IoError::parse(line, "records are not time-ordered"));
        }
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{replay, AgeMode};

    #[test]
    fn round_trip_jill_records() {
        let r = replay(crate::synth::jill(), AgeMode::Fractional).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &r.records).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back, r.records);
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        let text = format!(
            "{}\n{},10,false,5,0,0,0,4@1\n",
            RECORDS_HEADER.join(","),
            "ab".repeat(32)
        );
        assert!(matches!(
            read_records(text.as_bytes()),
            Err(IoError::Parse { line: 2, .. })
        ));
    }
}
