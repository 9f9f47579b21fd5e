//! Daily aggregation, trailing-window average dormancy and turnover, and the
//! creation-time distribution of destroyed coins.
//!
//! Average dormancy over a window is coin-days destroyed divided by the
//! volume destroyed in the same window. Windows are trailing and inclusive:
//! the point for day `d` with window `n` covers `[d - n + 1, d]`. Days with
//! no records count as zero-volume days.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::ledger::{
    sat_seconds_to_coin_days, Amount, SpendRecord, Timestamp, Txid, SECONDS_PER_DAY,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("no input data")]
    EmptyInput,
    #[error("window must be at least one day")]
    ZeroWindow,
    #[error("dormancy must be positive, got {0}")]
    NonPositiveDormancy(f64),
    #[error("histogram needs at least one bin")]
    ZeroBins,
}

/// Per-UTC-day totals of volume destroyed and coin-days destroyed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DailyBucket {
    pub day: NaiveDate,
    pub volume: Amount,
    pub sat_seconds: u128,
    pub tx_count: u64,
    /// Transactions with non-zero coin-days.
    pub dd_tx_count: u64,
    pub max_tx_sat_seconds: u128,
    /// Largest coin-days transaction of the day; ties go to the smallest
    /// txid. `None` when no transaction destroyed any coin-days.
    pub max_tx_id: Option<Txid>,
}

impl DailyBucket {
    fn empty(day: NaiveDate) -> Self {
        DailyBucket {
            day,
            volume: Amount::ZERO,
            sat_seconds: 0,
            tx_count: 0,
            dd_tx_count: 0,
            max_tx_sat_seconds: 0,
            max_tx_id: None,
        }
    }

    pub fn coin_days(&self) -> f64 {
        sat_seconds_to_coin_days(self.sat_seconds)
    }

    pub fn max_tx_coin_days(&self) -> f64 {
        sat_seconds_to_coin_days(self.max_tx_sat_seconds)
    }

    fn merge(&mut self, other: &DailyBucket) {
        self.volume = self
            .volume
            .checked_add(other.volume)
            .expect("daily volume overflow");
        self.sat_seconds += other.sat_seconds;
        self.tx_count += other.tx_count;
        self.dd_tx_count += other.dd_tx_count;
        if let Some(id) = other.max_tx_id {
            self.offer_max(other.max_tx_sat_seconds, id);
        }
    }

    fn offer_max(&mut self, sat_seconds: u128, txid: Txid) {
        let larger = sat_seconds > self.max_tx_sat_seconds;
        let tie_smaller =
            sat_seconds == self.max_tx_sat_seconds && self.max_tx_id.is_some_and(|cur| txid < cur);
        if larger || tie_smaller {
            self.max_tx_sat_seconds = sat_seconds;
            self.max_tx_id = Some(txid);
        }
    }

    fn add(&mut self, rec: &SpendRecord) {
        self.volume = self
            .volume
            .checked_add(rec.volume_destroyed)
            .expect("daily volume overflow");
        self.sat_seconds += rec.sat_seconds;
        self.tx_count += 1;
        if rec.sat_seconds > 0 {
            self.dd_tx_count += 1;
            self.offer_max(rec.sat_seconds, rec.txid);
        }
    }
}

/// Group records by the UTC day of their timestamp. One bucket per day that
/// has at least one record, in date order.
pub fn bucketize(records: &[SpendRecord]) -> Vec<DailyBucket> {
    let mut by_day: BTreeMap<NaiveDate, DailyBucket> = BTreeMap::new();
    for rec in records {
        let day = rec.time.day();
        by_day
            .entry(day)
            .or_insert_with(|| DailyBucket::empty(day))
            .add(rec);
    }
    by_day.into_values().collect()
}

/// Expand buckets to every calendar day between the first and last bucket,
/// inserting zero buckets for missing days.
pub fn fill_calendar(buckets: &[DailyBucket]) -> Vec<DailyBucket> {
    let Some(first) = buckets.iter().map(|b| b.day).min() else {
        return Vec::new();
    };
    let last = buckets.iter().map(|b| b.day).max().expect("non-empty");
    let len = (last - first).num_days() as usize + 1;
    let mut dense: Vec<DailyBucket> = (0..len)
        .map(|i| DailyBucket::empty(first + chrono::Days::new(i as u64)))
        .collect();
    for b in buckets {
        dense[(b.day - first).num_days() as usize].merge(b);
    }
    dense
}

/// Average dormancy over one trailing window ending on `day`.
#[derive(Clone, Debug, PartialEq)]
pub struct DormancyPoint {
    pub day: NaiveDate,
    pub window_days: u32,
    pub window_volume: Amount,
    pub window_sat_seconds: u128,
    /// Days; `None` when the window has no volume.
    pub dormancy: Option<f64>,
    /// `365 / dormancy`; `None` when dormancy is undefined or zero.
    pub turnover_annual: Option<f64>,
}

impl DormancyPoint {
    pub fn window_coin_days(&self) -> f64 {
        sat_seconds_to_coin_days(self.window_sat_seconds)
    }
}

/// Days per year used for annual turnover.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// Ratio of exact coin-days to exact volume, in days.
pub fn dormancy_days(sat_seconds: u128, volume: Amount) -> Option<f64> {
    if volume == Amount::ZERO {
        return None;
    }
    let denom = volume.sats() as u128 * SECONDS_PER_DAY as u128;
    Some(sat_seconds as f64 / denom as f64)
}

/// Trailing-window average dormancy and annual turnover, one point per
/// calendar day from the first to the last bucket.
pub fn dormancy_series(
    buckets: &[DailyBucket],
    window_days: u32,
) -> Result<Vec<DormancyPoint>, MetricsError> {
    if window_days == 0 {
        return Err(MetricsError::ZeroWindow);
    }
    if buckets.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let dense = fill_calendar(buckets);
    // prefix sums, exact
    let mut vol_prefix = Vec::with_capacity(dense.len() + 1);
    let mut dd_prefix = Vec::with_capacity(dense.len() + 1);
    vol_prefix.push(0u128);
    dd_prefix.push(0u128);
    for b in &dense {
        vol_prefix.push(vol_prefix.last().unwrap() + b.volume.sats() as u128);
        dd_prefix.push(dd_prefix.last().unwrap() + b.sat_seconds);
    }
    let w = window_days as usize;
    Ok(dense
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let lo = (i + 1).saturating_sub(w);
            let vol = vol_prefix[i + 1] - vol_prefix[lo];
            let dd = dd_prefix[i + 1] - dd_prefix[lo];
            let window_volume =
                Amount::from_sats(u64::try_from(vol).expect("window volume overflow"));
            let dormancy = dormancy_days(dd, window_volume);
            let turnover_annual = dormancy.and_then(|d| turnover(d, DAYS_PER_YEAR).ok());
            DormancyPoint {
                day: b.day,
                window_days,
                window_volume,
                window_sat_seconds: dd,
                dormancy,
                turnover_annual,
            }
        })
        .collect())
}

/// Expected number of times actively used coins turn over in `period_days`.
pub fn turnover(dormancy_days: f64, period_days: f64) -> Result<f64, MetricsError> {
    if dormancy_days.is_nan() || dormancy_days <= 0.0 {
        return Err(MetricsError::NonPositiveDormancy(dormancy_days));
    }
    Ok(period_days / dormancy_days)
}

/// Amount-weighted histogram of the creation times of destroyed coins.
#[derive(Clone, Debug, PartialEq)]
pub struct CreationHistogram {
    /// `bins + 1` edges; bin `i` is `[edges[i], edges[i+1])`.
    pub bin_edges: Vec<Timestamp>,
    pub mass: Vec<Amount>,
    pub normalized: Vec<f64>,
    /// Volume-weighted mean destruction time of the same coins.
    pub mean_spend_time: f64,
}

impl CreationHistogram {
    pub fn total_mass(&self) -> Amount {
        self.mass.iter().copied().sum()
    }

    pub fn bin_width_days(&self) -> f64 {
        self.bin_edges[1].seconds_since(self.bin_edges[0]) as f64 / SECONDS_PER_DAY as f64
    }

    /// First moment of the binned creation distribution, unix seconds.
    pub fn mean_creation_time(&self) -> f64 {
        self.normalized
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(p, e)| p * (e[0].unix_seconds() as f64 + e[1].unix_seconds() as f64) / 2.0)
            .sum()
    }

    /// Mean time since creation in days, from bin centres. Agrees with the
    /// exact average dormancy to within one bin width.
    pub fn mean_age_days(&self) -> f64 {
        (self.mean_spend_time - self.mean_creation_time()) / SECONDS_PER_DAY as f64
    }
}

/// Histogram over `bins` equal bins spanning midnight of the earliest
/// creation day to the midnight following the latest spend.
pub fn creation_histogram(
    records: &[SpendRecord],
    bins: usize,
) -> Result<CreationHistogram, MetricsError> {
    if bins == 0 {
        return Err(MetricsError::ZeroBins);
    }
    let inputs = || {
        records
            .iter()
            .flat_map(|r| r.inputs.iter().map(move |i| (r.time, i)))
    };
    let first_created = inputs()
        .map(|(_, i)| i.created_at)
        .min()
        .ok_or(MetricsError::EmptyInput)?;
    let last_spent = inputs().map(|(t, _)| t).max().expect("non-empty");
    let start = Timestamp::start_of_day(first_created.day());
    let end = Timestamp::start_of_day(last_spent.day()).plus_seconds(SECONDS_PER_DAY);
    let span = end.seconds_since(start);
    let width = (span + bins as i64 - 1) / bins as i64;

    let mut mass = vec![0u64; bins];
    let mut spend_moment: u128 = 0;
    let mut total: u128 = 0;
    for (spent_at, input) in inputs() {
        let idx = (input.created_at.seconds_since(start) / width) as usize;
        mass[idx.min(bins - 1)] += input.amount.sats();
        spend_moment += input.amount.sats() as u128 * spent_at.seconds_since(start) as u128;
        total += input.amount.sats() as u128;
    }
    if total == 0 {
        return Err(MetricsError::EmptyInput);
    }
    let normalized = mass.iter().map(|&m| m as f64 / total as f64).collect();
    Ok(CreationHistogram {
        bin_edges: (0..=bins)
            .map(|i| start.plus_seconds(i as i64 * width))
            .collect(),
        mass: mass.into_iter().map(Amount::from_sats).collect(),
        normalized,
        mean_spend_time: start.unix_seconds() as f64 + spend_moment as f64 / total as f64,
    })
}

/// Histogram with one-day bins.
pub fn daily_creation_histogram(
    records: &[SpendRecord],
) -> Result<CreationHistogram, MetricsError> {
    let first = records
        .iter()
        .flat_map(|r| r.inputs.iter().map(|i| i.created_at))
        .min()
        .ok_or(MetricsError::EmptyInput)?;
    let last = records
        .iter()
        .filter(|r| !r.inputs.is_empty())
        .map(|r| r.time)
        .max()
        .expect("non-empty");
    let days = (last.day() - first.day()).num_days() as usize + 1;
    creation_histogram(records, days)
}

/// Exact average dormancy of a set of records, in days.
pub fn records_dormancy(records: &[SpendRecord]) -> Option<f64> {
    let vol: u64 = records.iter().map(|r| r.volume_destroyed.sats()).sum();
    let dd: u128 = records.iter().map(|r| r.sat_seconds).sum();
    dormancy_days(dd, Amount::from_sats(vol))
}
