//! Coin-days-destroyed analytics for UTXO ledgers.
//!
//! Replay a transaction history, aggregate the coin-days it destroys, and
//! derive average dormancy, turnover, the Little's Law pool reading, and
//! the skew of daily coin-days. Synthetic ledgers with known ground truth
//! back the tests.

pub mod correlate;
pub mod io;
pub mod ledger;
pub mod metrics;
pub mod queueing;
pub mod synth;
pub mod tail;
pub mod window;

pub use ledger::{AgeMode, Amount, SpendRecord, Timestamp, Transaction, Txid};
pub use window::DateWindow;
