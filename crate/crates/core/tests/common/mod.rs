//! Test-only ledger builder and brute-force oracles, independent of the
//! synthetic generator and of the replay engine.
#![allow(dead_code)]

use std::collections::HashMap;

use chrono::NaiveDate;
use dormancy_core::ledger::{OutPoint, TxOut, SATS_PER_BTC, SECONDS_PER_DAY};
use dormancy_core::{Amount, Timestamp, Transaction, Txid};

pub const T0: i64 = 1_483_228_800; // 2017-01-01T00:00:00Z

pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

pub fn txid(tag: u64, n: u64) -> Txid {
    let mut b = [0u8; 32];
    b[..8].copy_from_slice(&tag.to_be_bytes());
    b[8..16].copy_from_slice(&n.to_be_bytes());
    b[31] = 0xA5;
    Txid::from_bytes(b)
}

pub fn day(i: u64) -> NaiveDate {
    NaiveDate::from_ymd_opt(2017, 1, 1).unwrap() + chrono::Days::new(i)
}

struct Coin {
    outpoint: OutPoint,
    sats: u64,
    addr: String,
}

/// Random valid ledger: coinbases, 1–3 input spends, fees, change back to a
/// sender address, and runs of transactions sharing one timestamp (including
/// spends of outputs created in the same second).
pub fn random_ledger(seed: u64, n: usize) -> Vec<Transaction> {
    let mut rng = SplitMix(seed);
    let mut pool: Vec<Coin> = Vec::new();
    let mut txs = Vec::with_capacity(n);
    let mut time = T0;
    for i in 0..n {
        if rng.chance(60) {
            time += rng.below(6 * 3600) as i64;
        }
        let id = txid(seed, i as u64);
        let tx = if pool.len() < 3 || rng.chance(15) {
            let outs = 1 + rng.below(2) as usize;
            let outputs: Vec<TxOut> = (0..outs)
                .map(|_| {
                    TxOut::new(
                        Amount::from_sats(1_000 + rng.below(50 * SATS_PER_BTC)),
                        format!("a{}", rng.below(200)),
                    )
                })
                .collect();
            Transaction {
                txid: id,
                time: Timestamp::from_unix(time),
                coinbase: true,
                inputs: vec![],
                outputs,
            }
        } else {
            let k = 1 + rng.below(3.min(pool.len() as u64)) as usize;
            let spent: Vec<Coin> = (0..k)
                .map(|_| {
                    let j = rng.below(pool.len() as u64) as usize;
                    pool.swap_remove(j)
                })
                .collect();
            let total: u64 = spent.iter().map(|c| c.sats).sum();
            let fee = if rng.chance(30) {
                0
            } else {
                rng.below(total / 100 + 1)
            };
            let mut left = total - fee;
            let mut outputs = Vec::new();
            if rng.chance(35) && left >= 2 {
                let change = 1 + rng.below(left - 1);
                outputs.push(TxOut::new(Amount::from_sats(change), spent[0].addr.clone()));
                left -= change;
            }
            while left > 0 {
                let part = if rng.chance(50) || left < 2 {
                    left
                } else {
                    1 + rng.below(left - 1)
                };
                outputs.push(TxOut::new(
                    Amount::from_sats(part),
                    format!("a{}", rng.below(200)),
                ));
                left -= part;
            }
            Transaction {
                txid: id,
                time: Timestamp::from_unix(time),
                coinbase: false,
                inputs: spent.iter().map(|c| c.outpoint).collect(),
                outputs,
            }
        };
        for (v, o) in tx.outputs.iter().enumerate() {
            pool.push(Coin {
                outpoint: tx.outpoint(v as u32),
                sats: o.amount.sats(),
                addr: o.address.clone(),
            });
        }
        txs.push(tx);
    }
    txs
}

/// Per-transaction `(volume sats, sat-seconds)` recomputed from the whole
/// history by looking each input up in the creating transaction.
pub fn oracle(txs: &[Transaction]) -> Vec<(u64, u128)> {
    let by_id: HashMap<Txid, &Transaction> = txs.iter().map(|t| (t.txid, t)).collect();
    txs.iter()
        .map(|tx| {
            tx.inputs.iter().fold((0u64, 0u128), |(vol, ss), op| {
                let src = by_id[&op.txid];
                let sats = src.outputs[op.vout as usize].amount.sats();
                let age = tx.time.unix_seconds() - src.time.unix_seconds();
                assert!(age >= 0);
                (vol + sats, ss + sats as u128 * age as u128)
            })
        })
        .collect()
}

/// Integral-mode variant of [`oracle`]: ages floored to whole days.
pub fn oracle_integral(txs: &[Transaction]) -> Vec<u128> {
    let by_id: HashMap<Txid, &Transaction> = txs.iter().map(|t| (t.txid, t)).collect();
    txs.iter()
        .map(|tx| {
            tx.inputs
                .iter()
                .map(|op| {
                    let src = by_id[&op.txid];
                    let sats = src.outputs[op.vout as usize].amount.sats() as u128;
                    let days = (tx.time.unix_seconds() - src.time.unix_seconds()) / SECONDS_PER_DAY;
                    sats * (days * SECONDS_PER_DAY) as u128
                })
                .sum()
        })
        .collect()
}

/// Multiply every output amount by `k`.
pub fn scale(txs: &[Transaction], k: u64) -> Vec<Transaction> {
    txs.iter()
        .map(|t| {
            let mut t = t.clone();
            for o in &mut t.outputs {
                o.amount = Amount::from_sats(o.amount.sats() * k);
            }
            t
        })
        .collect()
}
