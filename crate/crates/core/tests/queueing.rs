mod common;

use common::{random_ledger, scale};
use dormancy_core::ledger::{replay, SATS_PER_BTC, SECONDS_PER_DAY};
use dormancy_core::metrics::bucketize;
use dormancy_core::queueing::{
    littles_estimate, measured_pool_btc, stationarity_test, LittlesReport, StationarityParams,
    Verdict,
};
use dormancy_core::synth::{self, AmountDist, Arrival, GenConfig, HoldTime};
use dormancy_core::{AgeMode, DateWindow, Timestamp};
use proptest::prelude::*;

/// Report over the generator's horizon, with the measured pool.
fn report(cfg: &GenConfig) -> LittlesReport {
    let (txs, _) = synth::generate(cfg).unwrap();
    let recs = replay(&txs, AgeMode::Fractional).unwrap().records;
    let start = Timestamp::from_unix(cfg.start_time).day();
    let window = DateWindow::new(start, start + chrono::Days::new(cfg.days as u64 - 1)).unwrap();
    littles_estimate(&bucketize(&recs), window, StationarityParams::default())
        .unwrap()
        .with_measured_pool(measured_pool_btc(&recs, window))
}

fn ramp(seed: u64, hold_days: f64) -> GenConfig {
    GenConfig {
        seed,
        days: 100,
        start_time: synth::DEFAULT_START,
        arrival: Arrival::Ramp {
            start_per_day: 1.0,
            end_per_day: 200.0,
        },
        hold_time: HoldTime::Fixed { days: hold_days },
        amount: AmountDist::Fixed { sats: SATS_PER_BTC },
        change_fraction: 0.0,
    }
}

#[test]
fn stationary_stream_pool_matches_l() {
    for seed in 1..=5 {
        let cfg = synth::scenario_config("stationary", seed).unwrap().unwrap();
        let r = report(&cfg);
        let measured = r.measured_pool_btc.unwrap();
        assert!(
            (measured - 1000.0).abs() / 1000.0 < 0.05,
            "seed {seed}: measured {measured}"
        );
        assert!(
            (r.l_btc - 1000.0).abs() / 1000.0 < 0.05,
            "seed {seed}: L {}",
            r.l_btc
        );
        assert!(r.relative_error().unwrap() < 0.05, "seed {seed}: {r:?}");
        assert_eq!(r.stationary, Verdict::Stationary, "seed {seed}");
    }
}

#[test]
fn exponential_hold_stream_pool_matches_l() {
    for seed in 1..=5 {
        let cfg = synth::scenario_config("exponential", seed)
            .unwrap()
            .unwrap();
        let r = report(&cfg);
        assert!(r.relative_error().unwrap() < 0.05, "seed {seed}: {r:?}");
        assert_eq!(r.stationary, Verdict::Stationary, "seed {seed}");
    }
}

#[test]
fn ramp_stream_is_flagged_and_misses_bound() {
    for seed in 1..=5 {
        let cfg = synth::scenario_config("ramp", seed).unwrap().unwrap();
        let r = report(&cfg);
        assert_eq!(r.stationary, Verdict::Nonstationary, "seed {seed}");
        assert!(r.relative_error().unwrap() > 0.05, "seed {seed}: {r:?}");
    }
}

#[test]
fn long_hold_ramp_error_exceeds_half() {
    for seed in 1..=5 {
        let r = report(&ramp(seed, 40.0));
        // the first segment precedes any spend, so the diagnostic cannot
        // call it stationary
        assert_ne!(r.stationary, Verdict::Stationary);
        assert!(r.relative_error().unwrap() > 0.5, "seed {seed}: {r:?}");
    }
}

fn day_buckets(vols: &[u64], hold_days: u64) -> Vec<dormancy_core::metrics::DailyBucket> {
    vols.iter()
        .enumerate()
        .map(|(i, &v)| {
            let sats = v * SATS_PER_BTC;
            dormancy_core::metrics::DailyBucket {
                day: common::day(i as u64),
                volume: dormancy_core::Amount::from_sats(sats),
                sat_seconds: sats as u128 * hold_days as u128 * SECONDS_PER_DAY as u128,
                tx_count: 1,
                dd_tx_count: 1,
                max_tx_sat_seconds: 0,
                max_tx_id: None,
            }
        })
        .collect()
}

#[test]
fn stationarity_spot_cases() {
    let w = DateWindow::new(common::day(0), common::day(19)).unwrap();
    let flat =
        stationarity_test(&day_buckets(&[10; 20], 5), w, StationarityParams::default()).unwrap();
    assert_eq!(flat.verdict, Verdict::Stationary);
    assert_eq!(flat.drift_stat, 0.0);

    let mut vols = vec![10; 10];
    vols.extend([20; 10]);
    let two = StationarityParams {
        segments: 2,
        tol: 0.25,
    };
    let doubled = stationarity_test(&day_buckets(&vols, 5), w, two).unwrap();
    assert!((doubled.volume_drift - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(doubled.verdict, Verdict::Nonstationary);

    let mut gap = vec![10; 20];
    gap[..5].fill(0);
    let g = stationarity_test(&day_buckets(&gap, 5), w, StationarityParams::default()).unwrap();
    assert_eq!(g.verdict, Verdict::Indeterminate);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn l_times_t_is_window_coin_days(seed in any::<u64>(), a in 0u64..10, len in 0u64..30) {
        let recs = replay(random_ledger(seed, 300), AgeMode::Fractional).unwrap().records;
        let buckets = bucketize(&recs);
        let w = DateWindow::new(common::day(a), common::day(a + len)).unwrap();
        let dd: u128 = buckets.iter().filter(|b| w.contains(b.day)).map(|b| b.sat_seconds).sum();
        match littles_estimate(&buckets, w, StationarityParams::default()) {
            Ok(r) => {
                let coin_days = dd as f64 / (SATS_PER_BTC as f64 * SECONDS_PER_DAY as f64);
                prop_assert!((r.l_btc * w.days() as f64 - coin_days).abs() <= 1e-9 * coin_days.max(1e-300));
                prop_assert_eq!(r.l_btc, r.lambda_btc_per_day * r.w_days);
                prop_assert!(r.lambda_btc_per_day >= 0.0 && r.w_days >= 0.0 && r.drift_stat >= 0.0);
            }
            Err(_) => {
                let vol: u64 = buckets.iter().filter(|b| w.contains(b.day)).map(|b| b.volume.sats()).sum();
                prop_assert_eq!(vol, 0);
            }
        }
    }

    #[test]
    fn verdict_is_scale_invariant(seed in any::<u64>(), k in 2u64..100) {
        let txs = random_ledger(seed, 600);
        let w = DateWindow::new(common::day(0), common::day(15)).unwrap();
        let run = |txs: &[dormancy_core::Transaction]| {
            let recs = replay(txs, AgeMode::Fractional).unwrap().records;
            stationarity_test(&bucketize(&recs), w, StationarityParams::default()).unwrap()
        };
        let a = run(&txs);
        let b = run(&scale(&txs, k));
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((a.drift_stat - b.drift_stat).abs() <= 1e-12 * a.drift_stat.max(1.0));
    }
}
