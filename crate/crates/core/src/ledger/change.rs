use std::collections::BTreeSet;

use super::types::{Amount, Transaction};

/// A transaction with its outputs annotated by the change heuristic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedTransaction {
    pub tx: Transaction,
    /// One flag per output, true when the output pays back to a sender.
    pub is_change: Vec<bool>,
}

impl AnnotatedTransaction {
    pub fn change_value(&self) -> Amount {
        self.tx
            .outputs
            .iter()
            .zip(&self.is_change)
            .filter(|(_, &c)| c)
            .map(|(o, _)| o.amount)
            .sum()
    }

    pub fn change_vouts(&self) -> impl Iterator<Item = u32> + '_ {
        self.is_change
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| i as u32)
    }
}

/// Flags every output whose address is one of `known_senders` (the
/// addresses of the coins the transaction consumes). Address equality only;
/// coinbase transactions are never annotated.
pub fn filter_change(tx: Transaction, known_senders: &BTreeSet<String>) -> AnnotatedTransaction {
    let is_change = if tx.coinbase {
        vec![false; tx.outputs.len()]
    } else {
        tx.outputs
            .iter()
            .map(|o| known_senders.contains(&o.address))
            .collect()
    };
    AnnotatedTransaction { tx, is_change }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::types::{OutPoint, Timestamp, TxOut, Txid};

    fn tx(coinbase: bool, outs: &[(&str, u64)]) -> Transaction {
        Transaction {
            txid: Txid::from_bytes([7; 32]),
            time: Timestamp::from_unix(0),
            coinbase,
            inputs: if coinbase {
                vec![]
            } else {
                vec![OutPoint {
                    txid: Txid::from_bytes([1; 32]),
                    vout: 0,
                }]
            },
            outputs: outs
                .iter()
                .map(|(a, s)| TxOut::new(Amount::from_sats(*s), *a))
                .collect(),
        }
    }

    #[test]
    fn output_back_to_sender_is_change() {
        let senders = BTreeSet::from(["A".to_string()]);
        let ann = filter_change(tx(false, &[("A", 30), ("B", 70)]), &senders);
        assert_eq!(ann.is_change, vec![true, false]);
        assert_eq!(ann.change_value(), Amount::from_sats(30));
        assert_eq!(ann.change_vouts().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn coinbase_is_never_flagged() {
        let senders = BTreeSet::from(["A".to_string()]);
        let ann = filter_change(tx(true, &[("A", 50)]), &senders);
        assert_eq!(ann.is_change, vec![false]);
        assert_eq!(ann.change_value(), Amount::ZERO);
    }
}
