//! Skew of daily coin-days destroyed: how much of each day comes from its
//! single largest transaction, and what one very old spend would do to the
//! average dormancy of a window.

use chrono::NaiveDate;
use serde::Serialize;

use crate::ledger::{sat_seconds_to_coin_days, Amount, Txid};
use crate::metrics::{dormancy_days, DailyBucket};
use crate::window::DateWindow;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TailError {
    #[error("no defined max-share points in {0}")]
    EmptyRange(DateWindow),
    #[error("window has no volume")]
    EmptyWindow,
    #[error("age must be a non-negative number of days, got {0}")]
    InvalidAge(f64),
}

/// Share of a day's coin-days destroyed contributed by its largest
/// transaction. Days with zero coin-days carry `share: None`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxSharePoint {
    pub day: NaiveDate,
    pub share: Option<f64>,
    pub max_tx_id: Option<Txid>,
    pub total_coin_days: f64,
}

pub fn max_share_series(buckets: &[DailyBucket]) -> Vec<MaxSharePoint> {
    buckets
        .iter()
        .map(|b| {
            let share = (b.sat_seconds > 0).then(|| {
                if b.max_tx_sat_seconds == b.sat_seconds {
                    1.0
                } else {
                    b.max_tx_sat_seconds as f64 / b.sat_seconds as f64
                }
            });
            MaxSharePoint {
                day: b.day,
                share,
                max_tx_id: share.and(b.max_tx_id),
                total_coin_days: b.coin_days(),
            }
        })
        .collect()
}

/// Lower median of the defined shares whose day falls in `range`.
pub fn median_share(points: &[MaxSharePoint], range: DateWindow) -> Result<f64, TailError> {
    let mut shares: Vec<f64> = points
        .iter()
        .filter(|p| range.contains(p.day))
        .filter_map(|p| p.share)
        .collect();
    if shares.is_empty() {
        return Err(TailError::EmptyRange(range));
    }
    shares.sort_by(f64::total_cmp);
    Ok(shares[(shares.len() - 1) / 2])
}

/// Volume, coin-days and largest single-transaction coin-days of a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowTotals {
    pub volume: Amount,
    pub sat_seconds: u128,
    pub max_tx_sat_seconds: u128,
}

impl WindowTotals {
    pub fn from_buckets(buckets: &[DailyBucket], window: DateWindow) -> Self {
        buckets.iter().filter(|b| window.contains(b.day)).fold(
            WindowTotals {
                volume: Amount::ZERO,
                sat_seconds: 0,
                max_tx_sat_seconds: 0,
            },
            |acc, b| WindowTotals {
                volume: acc
                    .volume
                    .checked_add(b.volume)
                    .expect("window volume overflow"),
                sat_seconds: acc.sat_seconds + b.sat_seconds,
                max_tx_sat_seconds: acc.max_tx_sat_seconds.max(b.max_tx_sat_seconds),
            },
        )
    }

    pub fn coin_days(&self) -> f64 {
        sat_seconds_to_coin_days(self.sat_seconds)
    }

    pub fn dormancy(&self) -> Option<f64> {
        dormancy_days(self.sat_seconds, self.volume)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhatIfImpact {
    pub injected_volume_sats: u64,
    pub injected_age_days: f64,
    pub injected_coin_days: f64,
    pub baseline_dormancy: f64,
    pub new_dormancy: f64,
    /// Injected coin-days over the window's largest single-transaction
    /// coin-days; `None` if the window has none.
    pub dd_multiple_of_max: Option<f64>,
}

/// Add one hypothetical spend of `volume` coins aged `age_days` to the
/// window and recompute its average dormancy.
pub fn whatif_spend(
    window: &WindowTotals,
    volume: Amount,
    age_days: f64,
) -> Result<WhatIfImpact, TailError> {
    if !age_days.is_finite() || age_days < 0.0 {
        return Err(TailError::InvalidAge(age_days));
    }
    let baseline = window.dormancy().ok_or(TailError::EmptyWindow)?;
    let injected_coin_days = volume.to_btc() * age_days;
    let new_dormancy = if volume == Amount::ZERO {
        baseline
    } else {
        (window.coin_days() + injected_coin_days) / (window.volume.to_btc() + volume.to_btc())
    };
    let max = sat_seconds_to_coin_days(window.max_tx_sat_seconds);
    Ok(WhatIfImpact {
        injected_volume_sats: volume.sats(),
        injected_age_days: age_days,
        injected_coin_days,
        baseline_dormancy: baseline,
        new_dormancy,
        dd_multiple_of_max: (max > 0.0).then(|| injected_coin_days / max),
    })
}
