//! Coin-days destroyed read as Little's Law.
//!
//! Over a window of `T` days with volume `ΔB` and coin-days `D`, spends
//! arrive at `λ = ΔB / T` BTC per day and wait `W = D / ΔB` days on average,
//! so `L = λW = D / T` is the implied average pool of coins in flight. The
//! reading only holds when volume and dormancy are stationary over the
//! window; [`stationarity_test`] is a segment-mean drift diagnostic for that.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::ledger::{Amount, SpendRecord, SECONDS_PER_DAY};
use crate::metrics::{dormancy_days, DailyBucket};
use crate::window::DateWindow;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueueingError {
    #[error("window {0} has no volume")]
    EmptyWindow(DateWindow),
    #[error("window of {days} days is shorter than {needed} (2 x segments)")]
    WindowTooShort { days: i64, needed: i64 },
    #[error("segments must be at least 1")]
    ZeroSegments,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stationary,
    Nonstationary,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationarityParams {
    pub segments: usize,
    pub tol: f64,
}

impl Default for StationarityParams {
    fn default() -> Self {
        StationarityParams {
            segments: 4,
            tol: 0.25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StationarityOutcome {
    pub verdict: Verdict,
    /// Larger of the volume and dormancy drifts.
    pub drift_stat: f64,
    pub volume_drift: f64,
    pub dormancy_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LittlesReport {
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub window_days: i64,
    pub lambda_btc_per_day: f64,
    pub w_days: f64,
    pub l_btc: f64,
    /// Time-averaged pool of coins in flight; `None` unless computed from a
    /// closed ledger with [`measured_pool_btc`].
    pub measured_pool_btc: Option<f64>,
    pub stationary: Verdict,
    pub drift_stat: f64,
    pub volume_drift: f64,
    pub dormancy_drift: f64,
}

impl LittlesReport {
    pub fn with_measured_pool(mut self, pool_btc: f64) -> Self {
        self.measured_pool_btc = Some(pool_btc);
        self
    }

    /// `|measured - L| / L`, when a measured pool is available.
    pub fn relative_error(&self) -> Option<f64> {
        self.measured_pool_btc
            .map(|m| (m - self.l_btc).abs() / self.l_btc)
    }
}

/// Per-day `(volume sats, sat_seconds)` for every day of `window`, zero
/// where no bucket exists.
fn window_days(buckets: &[DailyBucket], window: DateWindow) -> Vec<(u64, u128)> {
    let by_day: HashMap<NaiveDate, &DailyBucket> = buckets
        .iter()
        .filter(|b| window.contains(b.day))
        .map(|b| (b.day, b))
        .collect();
    window
        .iter_days()
        .map(|d| {
            by_day
                .get(&d)
                .map_or((0, 0), |b| (b.volume.sats(), b.sat_seconds))
        })
        .collect()
}

/// Split `window` into `segments` near-equal runs of days and compare each
/// segment's mean daily volume and dormancy with the window-wide values.
pub fn stationarity_test(
    buckets: &[DailyBucket],
    window: DateWindow,
    params: StationarityParams,
) -> Result<StationarityOutcome, QueueingError> {
    if params.segments == 0 {
        return Err(QueueingError::ZeroSegments);
    }
    let needed = 2 * params.segments as i64;
    if window.days() < needed {
        return Err(QueueingError::WindowTooShort {
            days: window.days(),
            needed,
        });
    }
    let days = window_days(buckets, window);
    let n = days.len();
    let total_vol: u128 = days.iter().map(|d| d.0 as u128).sum();
    let total_dd: u128 = days.iter().map(|d| d.1).sum();
    let grand_volume = total_vol as f64 / n as f64;
    let grand_dormancy = ratio_days(total_dd, total_vol);

    let mut volume_drift: f64 = 0.0;
    let mut dormancy_drift: f64 = 0.0;
    let mut any_empty = false;
    for s in 0..params.segments {
        let seg = &days[s * n / params.segments..(s + 1) * n / params.segments];
        let vol: u128 = seg.iter().map(|d| d.0 as u128).sum();
        let dd: u128 = seg.iter().map(|d| d.1).sum();
        if vol == 0 {
            any_empty = true;
        }
        if grand_volume > 0.0 {
            let mean = vol as f64 / seg.len() as f64;
            volume_drift = volume_drift.max((mean - grand_volume).abs() / grand_volume);
        }
        if vol > 0 && grand_dormancy > 0.0 {
            let dorm = ratio_days(dd, vol);
            dormancy_drift = dormancy_drift.max((dorm - grand_dormancy).abs() / grand_dormancy);
        }
    }
    let verdict = if any_empty {
        Verdict::Indeterminate
    } else if volume_drift <= params.tol && dormancy_drift <= params.tol {
        Verdict::Stationary
    } else {
        Verdict::Nonstationary
    };
    Ok(StationarityOutcome {
        verdict,
        drift_stat: volume_drift.max(dormancy_drift),
        volume_drift,
        dormancy_drift,
    })
}

fn ratio_days(sat_seconds: u128, sats: u128) -> f64 {
    if sats == 0 {
        0.0
    } else {
        sat_seconds as f64 / (sats as f64 * SECONDS_PER_DAY as f64)
    }
}

/// Estimate `λ`, `W` and `L = λW` over `window`. Windows too short for the
/// stationarity diagnostic get an `indeterminate` verdict.
pub fn littles_estimate(
    buckets: &[DailyBucket],
    window: DateWindow,
    params: StationarityParams,
) -> Result<LittlesReport, QueueingError> {
    let days = window_days(buckets, window);
    let vol: u128 = days.iter().map(|d| d.0 as u128).sum();
    let dd: u128 = days.iter().map(|d| d.1).sum();
    let volume = Amount::from_sats(u64::try_from(vol).expect("window volume overflow"));
    let w_days = dormancy_days(dd, volume).ok_or(QueueingError::EmptyWindow(window))?;
    let lambda = volume.to_btc() / window.days() as f64;
    let outcome = match stationarity_test(buckets, window, params) {
        Ok(o) => o,
        Err(QueueingError::WindowTooShort { .. }) => StationarityOutcome {
            verdict: Verdict::Indeterminate,
            drift_stat: 0.0,
            volume_drift: 0.0,
            dormancy_drift: 0.0,
        },
        Err(e) => return Err(e),
    };
    Ok(LittlesReport {
        window_start: window.start,
        window_end: window.end,
        window_days: window.days(),
        lambda_btc_per_day: lambda,
        w_days,
        l_btc: lambda * w_days,
        measured_pool_btc: None,
        stationary: outcome.verdict,
        drift_stat: outcome.drift_stat,
        volume_drift: outcome.volume_drift,
        dormancy_drift: outcome.dormancy_drift,
    })
}

/// Time average over `window` of the coins that have been created but not
/// yet spent, counting only coins whose spend appears in `records`.
///
/// Meaningful on closed ledgers, where every coin of interest is eventually
/// spent; on open-ended data, coins still unspent are missing from the pool.
pub fn measured_pool_btc(records: &[SpendRecord], window: DateWindow) -> f64 {
    let (lo, hi) = window.instant_bounds();
    let mut sat_seconds: u128 = 0;
    for rec in records {
        if rec.time <= lo {
            continue;
        }
        for input in &rec.inputs {
            let from = input.created_at.max(lo);
            let to = rec.time.min(hi);
            if to > from {
                sat_seconds += input.amount.sats() as u128 * to.seconds_since(from) as u128;
            }
        }
    }
    let span = hi.seconds_since(lo) as f64;
    sat_seconds as f64 / span / crate::ledger::SATS_PER_BTC as f64
}
