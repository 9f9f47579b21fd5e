use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SATS_PER_BTC: u64 = 100_000_000;
pub const SECONDS_PER_DAY: i64 = 86_400;

/// One coin-day expressed in satoshi-seconds.
pub const SAT_SECONDS_PER_COIN_DAY: u128 = SATS_PER_BTC as u128 * SECONDS_PER_DAY as u128;

/// An amount of bitcoin in satoshis.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Amount(u64);

impl Amount {
    pub const ZERO: Amount = Amount(0);

    pub const fn from_sats(sats: u64) -> Self {
        Amount(sats)
    }

    /// Whole bitcoins. Panics on overflow, which cannot happen for any
    /// realistic supply.
    pub const fn from_btc(btc: u64) -> Self {
        Amount(btc * SATS_PER_BTC)
    }

    pub const fn sats(self) -> u64 {
        self.0
    }

    pub fn to_btc(self) -> f64 {
        self.0 as f64 / SATS_PER_BTC as f64
    }

    pub fn checked_add(self, other: Amount) -> Option<Amount> {
        self.0.checked_add(other.0).map(Amount)
    }

    pub fn checked_sub(self, other: Amount) -> Option<Amount> {
        self.0.checked_sub(other.0).map(Amount)
    }

    pub fn saturating_sub(self, other: Amount) -> Amount {
        Amount(self.0.saturating_sub(other.0))
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} sat", self.0)
    }
}

impl std::iter::Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Self {
        Amount(iter.map(|a| a.0).sum())
    }
}

/// Seconds since the unix epoch, UTC.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_unix(secs: i64) -> Self {
        Timestamp(secs)
    }

    pub const fn unix_seconds(self) -> i64 {
        self.0
    }

    /// Midnight UTC at the start of `day`.
    pub fn start_of_day(day: NaiveDate) -> Self {
        Timestamp(
            day.and_hms_opt(0, 0, 0)
                .expect("midnight")
                .and_utc()
                .timestamp(),
        )
    }

    /// The UTC calendar day containing this instant.
    pub fn day(self) -> NaiveDate {
        DateTime::<Utc>::from_timestamp(self.0.div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY, 0)
            .expect("timestamp within chrono range")
            .date_naive()
    }

    pub fn plus_seconds(self, secs: i64) -> Self {
        Timestamp(self.0 + secs)
    }

    pub fn seconds_since(self, earlier: Timestamp) -> i64 {
        self.0 - earlier.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid txid {0:?}: expected 64 hex characters")]
pub struct TxidParseError(String);

/// 32-byte transaction identifier, hex encoded in files.
///
/// Ordering is bytewise, which coincides with lexicographic order of the
/// lowercase hex encoding.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Txid([u8; 32]);

impl Txid {
    pub const fn from_bytes(bytes: [u8; 32]) -> Self {
        Txid(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for Txid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Txid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Txid({})", hex::encode(self.0))
    }
}

impl FromStr for Txid {
    type Err = TxidParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bytes = [0u8; 32];
        hex::decode_to_slice(s, &mut bytes).map_err(|_| TxidParseError(s.to_string()))?;
        Ok(Txid(bytes))
    }
}

impl Serialize for Txid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Txid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OutPoint {
    pub txid: Txid,
    pub vout: u32,
}

impl fmt::Display for OutPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.txid, self.vout)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxOut {
    #[serde(rename = "sats")]
    pub amount: Amount,
    #[serde(rename = "addr")]
    pub address: String,
}

impl TxOut {
    pub fn new(amount: Amount, address: impl Into<String>) -> Self {
        TxOut {
            amount,
            address: address.into(),
        }
    }
}

/// A timestamped spend event. Field order matches the JSON Lines format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub txid: Txid,
    pub time: Timestamp,
    pub coinbase: bool,
    pub inputs: Vec<OutPoint>,
    pub outputs: Vec<TxOut>,
}

impl Transaction {
    pub fn output_value(&self) -> Option<Amount> {
        self.outputs
            .iter()
            .try_fold(Amount::ZERO, |acc, o| acc.checked_add(o.amount))
    }

    pub fn outpoint(&self, vout: u32) -> OutPoint {
        OutPoint {
            txid: self.txid,
            vout,
        }
    }
}

/// An unspent output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Utxo {
    pub outpoint: OutPoint,
    pub amount: Amount,
    pub created_at: Timestamp,
    pub address: String,
}

/// How the age of a spent coin is converted into days.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AgeMode {
    /// Exact elapsed seconds divided by 86 400.
    #[default]
    Fractional,
    /// Whole days only (floor of the fractional age).
    Integral,
}

impl AgeMode {
    /// Age-weighted amount in satoshi-seconds. `age_seconds` must be
    /// non-negative.
    pub fn weight(self, amount: Amount, age_seconds: i64) -> u128 {
        debug_assert!(age_seconds >= 0);
        let secs = match self {
            AgeMode::Fractional => age_seconds,
            AgeMode::Integral => age_seconds - age_seconds % SECONDS_PER_DAY,
        };
        amount.sats() as u128 * secs as u128
    }
}

impl FromStr for AgeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fractional" => Ok(AgeMode::Fractional),
            "integral" => Ok(AgeMode::Integral),
            other => Err(format!(
                "unknown age mode {other:?} (expected fractional or integral)"
            )),
        }
    }
}

pub fn sat_seconds_to_coin_days(sat_seconds: u128) -> f64 {
    sat_seconds as f64 / SAT_SECONDS_PER_COIN_DAY as f64
}

/// A coin consumed by a spend, as seen at the moment it was destroyed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpentInput {
    pub amount: Amount,
    pub created_at: Timestamp,
}

/// Result of applying one transaction: volume destroyed and its
/// coin-days.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpendRecord {
    pub txid: Txid,
    pub time: Timestamp,
    pub coinbase: bool,
    pub volume_destroyed: Amount,
    /// Value of outputs flagged by the change heuristic. Zero unless the
    /// transaction pays back to one of its input addresses.
    pub change: Amount,
    /// Coin-days destroyed in exact satoshi-seconds.
    pub sat_seconds: u128,
    pub inputs: Vec<SpentInput>,
}

impl SpendRecord {
    pub fn coin_days(&self) -> f64 {
        sat_seconds_to_coin_days(self.sat_seconds)
    }

    /// Recompute the age weighting under another mode.
    pub fn with_mode(mut self, mode: AgeMode) -> Self {
        let time = self.time;
        self.sat_seconds = self
            .inputs
            .iter()
            .map(|i| mode.weight(i.amount, time.seconds_since(i.created_at)))
            .sum();
        self
    }

    /// The same record with change outputs removed from the volume. Coin
    /// days are unchanged: they are computed from the inputs.
    pub fn excluding_change(mut self) -> Self {
        self.volume_destroyed = self.volume_destroyed.saturating_sub(self.change);
        self.change = Amount::ZERO;
        self
    }
}
