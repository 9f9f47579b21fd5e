use std::collections::{BTreeSet, HashMap, HashSet};

use super::change::filter_change;
use super::types::{
    AgeMode, Amount, OutPoint, SpendRecord, SpentInput, Timestamp, Transaction, Txid, Utxo,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("transaction {txid} spends {outpoint}, which is not in the unspent set")]
    UnknownInput { txid: Txid, outpoint: OutPoint },
    #[error("transaction {txid} at {spent_at} spends {outpoint} created later at {created_at}")]
    TimeTravel {
        txid: Txid,
        outpoint: OutPoint,
        created_at: Timestamp,
        spent_at: Timestamp,
    },
    #[error("duplicate txid {0}")]
    DuplicateTxid(Txid),
    #[error("transaction {txid} at {time} is earlier than the previous transaction at {previous}")]
    OutOfOrder {
        txid: Txid,
        time: Timestamp,
        previous: Timestamp,
    },
    #[error("non-coinbase transaction {0} has no inputs")]
    MissingInputs(Txid),
    #[error("coinbase transaction {0} has inputs")]
    CoinbaseWithInputs(Txid),
    #[error("transaction {txid} outputs {outputs} exceed inputs {inputs}")]
    Overspend {
        txid: Txid,
        inputs: Amount,
        outputs: Amount,
    },
    #[error("transaction {txid} output {vout} has zero value")]
    ZeroOutput { txid: Txid, vout: u32 },
    #[error("amount overflow in transaction {0}")]
    AmountOverflow(Txid),
}

/// The unspent-output set of a ledger being replayed.
///
/// Single writer: transactions are applied one at a time in non-decreasing
/// time order. A failed [`UtxoSet::apply`] leaves the set untouched.
#[derive(Clone, Debug, Default)]
pub struct UtxoSet {
    unspent: HashMap<OutPoint, Utxo>,
    seen_txids: HashSet<Txid>,
    last_time: Option<Timestamp>,
    minted: u128,
    fees: u128,
}

impl UtxoSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Start from a snapshot of unspent outputs. Their value counts as
    /// minted for the conservation check.
    pub fn from_snapshot(utxos: impl IntoIterator<Item = Utxo>) -> Self {
        let mut set = Self::new();
        for u in utxos {
            set.minted += u.amount.sats() as u128;
            set.seen_txids.insert(u.outpoint.txid);
            set.unspent.insert(u.outpoint, u);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.unspent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unspent.is_empty()
    }

    pub fn get(&self, outpoint: &OutPoint) -> Option<&Utxo> {
        self.unspent.get(outpoint)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Utxo> {
        self.unspent.values()
    }

    pub fn total_value(&self) -> u128 {
        self.unspent.values().map(|u| u.amount.sats() as u128).sum()
    }

    /// Total value created by coinbase transactions (and snapshot outputs).
    pub fn minted(&self) -> u128 {
        self.minted
    }

    pub fn fees(&self) -> u128 {
        self.fees
    }

    pub fn last_time(&self) -> Option<Timestamp> {
        self.last_time
    }

    /// Addresses of the coins `tx` would consume. Unknown inputs are
    /// skipped.
    pub fn input_addresses(&self, tx: &Transaction) -> BTreeSet<String> {
        tx.inputs
            .iter()
            .filter_map(|op| self.unspent.get(op))
            .map(|u| u.address.clone())
            .collect()
    }

    /// Apply one transaction: remove its inputs, insert its outputs, and
    /// report the volume and coin-days it destroyed.
    pub fn apply(&mut self, tx: &Transaction, mode: AgeMode) -> Result<SpendRecord, LedgerError> {
        let txid = tx.txid;
        if self.seen_txids.contains(&txid) {
            return Err(LedgerError::DuplicateTxid(txid));
        }
        if let Some(previous) = self.last_time {
            if tx.time < previous {
                return Err(LedgerError::OutOfOrder {
                    txid,
                    time: tx.time,
                    previous,
                });
            }
        }
        if tx.coinbase && !tx.inputs.is_empty() {
            return Err(LedgerError::CoinbaseWithInputs(txid));
        }
        if !tx.coinbase && tx.inputs.is_empty() {
            return Err(LedgerError::MissingInputs(txid));
        }
        if let Some(vout) = tx.outputs.iter().position(|o| o.amount == Amount::ZERO) {
            return Err(LedgerError::ZeroOutput {
                txid,
                vout: vout as u32,
            });
        }
        let outputs = tx.output_value().ok_or(LedgerError::AmountOverflow(txid))?;

        let mut spent = Vec::with_capacity(tx.inputs.len());
        let mut distinct = HashSet::with_capacity(tx.inputs.len());
        let mut volume = Amount::ZERO;
        let mut sat_seconds: u128 = 0;
        for op in &tx.inputs {
            let utxo = match self.unspent.get(op) {
                Some(u) if distinct.insert(*op) => u,
                // absent, or listed twice in the same transaction
                _ => {
                    return Err(LedgerError::UnknownInput {
                        txid,
                        outpoint: *op,
                    })
                }
            };
            if utxo.created_at > tx.time {
                return Err(LedgerError::TimeTravel {
                    txid,
                    outpoint: *op,
                    created_at: utxo.created_at,
                    spent_at: tx.time,
                });
            }
            volume = volume
                .checked_add(utxo.amount)
                .ok_or(LedgerError::AmountOverflow(txid))?;
            sat_seconds += mode.weight(utxo.amount, tx.time.seconds_since(utxo.created_at));
            spent.push(SpentInput {
                amount: utxo.amount,
                created_at: utxo.created_at,
            });
        }
        if !tx.coinbase && outputs > volume {
            return Err(LedgerError::Overspend {
                txid,
                inputs: volume,
                outputs,
            });
        }

        let change = if tx.coinbase {
            Amount::ZERO
        } else {
            filter_change(tx.clone(), &self.input_addresses(tx)).change_value()
        };

        // validated; mutate
        for op in &tx.inputs {
            self.unspent.remove(op);
        }
        for (vout, out) in tx.outputs.iter().enumerate() {
            let outpoint = tx.outpoint(vout as u32);
            self.unspent.insert(
                outpoint,
                Utxo {
                    outpoint,
                    amount: out.amount,
                    created_at: tx.time,
                    address: out.address.clone(),
                },
            );
        }
        if tx.coinbase {
            self.minted += outputs.sats() as u128;
        } else {
            self.fees += (volume.sats() - outputs.sats()) as u128;
        }
        self.seen_txids.insert(txid);
        self.last_time = Some(tx.time);

        Ok(SpendRecord {
            txid,
            time: tx.time,
            coinbase: tx.coinbase,
            volume_destroyed: volume,
            change,
            sat_seconds,
            inputs: spent,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("transaction #{index}: {source}")]
pub struct ReplayError {
    pub index: usize,
    #[source]
    pub source: LedgerError,
}

/// Outcome of replaying a full stream.
#[derive(Clone, Debug)]
pub struct Replay {
    pub records: Vec<SpendRecord>,
    pub utxos: UtxoSet,
}

/// Replay a time-ordered transaction stream from an empty set.
pub fn replay<I>(txs: I, mode: AgeMode) -> Result<Replay, ReplayError>
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<Transaction>,
{
    replay_from(UtxoSet::new(), txs, mode)
}

pub fn replay_from<I>(mut utxos: UtxoSet, txs: I, mode: AgeMode) -> Result<Replay, ReplayError>
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<Transaction>,
{
    use std::borrow::Borrow;
    let mut records = Vec::new();
    for (index, tx) in txs.into_iter().enumerate() {
        let record = utxos
            .apply(tx.borrow(), mode)
            .map_err(|source| ReplayError { index, source })?;
        records.push(record);
    }
    Ok(Replay { records, utxos })
}
