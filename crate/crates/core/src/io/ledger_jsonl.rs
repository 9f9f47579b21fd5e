use std::io::{BufRead, Write};

use sha2::{Digest, Sha256};

use super::IoError;
use crate::ledger::{Timestamp, Transaction};

/// Streaming reader for a JSON Lines ledger. Blank lines are skipped; a
/// line earlier in time than its predecessor is an error.
pub struct LedgerReader<R> {
    inner: R,
    line: u64,
    previous: Option<Timestamp>,
    buf: String,
}

impl<R: BufRead> LedgerReader<R> {
    pub fn new(inner: R) -> Self {
        LedgerReader {
            inner,
            line: 0,
            previous: None,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for LedgerReader<R> {
    type Item = Result<Transaction, IoError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line += 1;
            let text = self.buf.trim();
            if text.is_empty() {
                continue;
            }
            let tx: Transaction = match serde_json::from_str(text) {
                Ok(tx) => tx,
                Err(e) => return Some(Err(IoError::parse(self.line, e))),
            };
            if let Some(prev) = self.previous {
                if tx.time < prev {
                    return Some(Err(IoError::OutOfOrder {
                        line: self.line,
                        time: tx.time.unix_seconds(),
                        previous: prev.unix_seconds(),
                    }));
                }
            }
            self.previous = Some(tx.time);
            return Some(Ok(tx));
        }
    }
}

pub fn read_ledger<R: BufRead>(reader: R) -> Result<Vec<Transaction>, IoError> {
    LedgerReader::new(reader).collect()
}

pub fn write_ledger<W: Write>(mut writer: W, txs: &[Transaction]) -> Result<(), IoError> {
    for tx in txs {
        serde_json::to_writer(&mut writer, tx).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

/// SHA-256 of the JSON Lines encoding, lowercase hex.
pub fn stream_hash(txs: &[Transaction]) -> String {
    let mut buf = Vec::new();
    write_ledger(&mut buf, txs).expect("writing to memory");
    hex::encode(Sha256::digest(&buf))
}
