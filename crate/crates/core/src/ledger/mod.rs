//! UTXO-set replay and per-transaction coin-days destroyed.
//!
//! Amounts are integer satoshis. Coin-days are carried as exact
//! satoshi-seconds (`u128`) and converted to BTC·days only at the edges, so
//! sums over days and windows are exact.

mod change;
mod types;
mod utxo;

pub use change::{filter_change, AnnotatedTransaction};
pub use types::{
    sat_seconds_to_coin_days, AgeMode, Amount, OutPoint, SpendRecord, SpentInput, Timestamp,
    Transaction, TxOut, Txid, TxidParseError, Utxo, SATS_PER_BTC, SAT_SECONDS_PER_COIN_DAY,
    SECONDS_PER_DAY,
};
pub use utxo::{replay, replay_from, LedgerError, Replay, ReplayError, UtxoSet};
