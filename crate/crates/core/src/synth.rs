//! Reproducible synthetic ledgers with known ground truth.
//!
//! Coins enter through coinbase transactions at the configured arrival
//! process. Each coin draws a holding time when it is created and is spent
//! exactly that long afterwards, so every spend's true age is known. A
//! spend pays a fresh address and, with probability `change_fraction`,
//! returns part of the coin to the sender's own address. Change outputs
//! draw their own holding time and are spent again later; payment outputs
//! are terminal. Every coin that is created is eventually spent, so the
//! stream runs past the arrival horizon until the last scheduled spend.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, and every distribution is sampled by inverse transform
//! or Box-Muller from 53-bit uniforms drawn here, so a given `(seed,
//! config)` yields the same bytes across releases. See
//! [`GENERATOR_VERSION`].

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ledger::{Amount, OutPoint, Timestamp, Transaction, TxOut, Txid, SECONDS_PER_DAY};

/// Identifies the random stream and sampling algorithms. Bump when either
/// changes, since generated fixtures change with it.
pub const GENERATOR_VERSION: &str = "chacha8-v1";

/// Version of the built-in named scenarios.
pub const FIXTURE_SET_VERSION: &str = "1";

/// 2017-01-01T00:00:00Z
pub const DEFAULT_START: i64 = 1_483_228_800;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("unknown scenario {0:?} (expected one of: {list})", list = SCENARIOS.join(", "))]
    UnknownScenario(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arrival {
    /// Evenly spaced arrivals.
    Constant {
        per_day: f64,
    },
    Poisson {
        rate_per_day: f64,
    },
    /// Poisson arrivals whose rate moves linearly from `start_per_day` to
    /// `end_per_day` over the horizon.
    Ramp {
        start_per_day: f64,
        end_per_day: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HoldTime {
    Fixed { days: f64 },
    Exponential { mean_days: f64 },
    Mixture { components: Vec<MixtureComponent> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub dist: HoldTime,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmountDist {
    Fixed {
        sats: u64,
    },
    /// `median_sats * exp(sigma * z)` with `z` standard normal.
    LogNormal {
        median_sats: u64,
        sigma: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Arrival horizon in days.
    pub days: u32,
    #[serde(default = "default_start")]
    pub start_time: i64,
    pub arrival: Arrival,
    pub hold_time: HoldTime,
    pub amount: AmountDist,
    /// Probability that a spend returns part of the coin as change.
    #[serde(default)]
    pub change_fraction: f64,
}

fn default_start() -> i64 {
    DEFAULT_START
}

fn positive(name: &str, v: f64) -> Result<(), SynthError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SynthError::InvalidConfig(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl HoldTime {
    fn validate(&self) -> Result<(), SynthError> {
        match self {
            HoldTime::Fixed { days } => {
                if days.is_finite() && *days >= 0.0 {
                    Ok(())
                } else {
                    Err(SynthError::InvalidConfig(format!(
                        "fixed hold must be >= 0, got {days}"
                    )))
                }
            }
            HoldTime::Exponential { mean_days } => positive("exponential mean_days", *mean_days),
            HoldTime::Mixture { components } => {
                if components.is_empty() {
                    return Err(SynthError::InvalidConfig("empty hold-time mixture".into()));
                }
                let mut total = 0.0;
                for c in components {
                    positive("mixture weight", c.weight)?;
                    c.dist.validate()?;
                    total += c.weight;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(SynthError::InvalidConfig(format!(
                        "mixture weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    fn sample_days(&self, rng: &mut Uniform) -> f64 {
        match self {
            HoldTime::Fixed { days } => *days,
            HoldTime::Exponential { mean_days } => -mean_days * (1.0 - rng.next()).ln(),
            HoldTime::Mixture { components } => {
                let u = rng.next();
                let mut acc = 0.0;
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        return c.dist.sample_days(rng);
                    }
                }
                components
                    .last()
                    .expect("validated non-empty")
                    .dist
                    .sample_days(rng)
            }
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.days == 0 {
            return Err(SynthError::InvalidConfig("days must be at least 1".into()));
        }
        match self.arrival {
            Arrival::Constant { per_day } => positive("constant per_day", per_day)?,
            Arrival::Poisson { rate_per_day } => positive("poisson rate_per_day", rate_per_day)?,
            Arrival::Ramp {
                start_per_day,
                end_per_day,
            } => {
                positive("ramp start_per_day", start_per_day)?;
                positive("ramp end_per_day", end_per_day)?;
            }
        }
        self.hold_time.validate()?;
        match self.amount {
            AmountDist::Fixed { sats: 0 } => {
                return Err(SynthError::InvalidConfig(
                    "fixed amount must be positive".into(),
                ))
            }
            AmountDist::LogNormal { median_sats, sigma } => {
                if median_sats == 0 {
                    return Err(SynthError::InvalidConfig(
                        "median_sats must be positive".into(),
                    ));
                }
                positive("lognormal sigma", sigma)?;
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.change_fraction) {
            return Err(SynthError::InvalidConfig(format!(
                "change_fraction must be in [0, 1], got {}",
                self.change_fraction
            )));
        }
        Ok(())
    }
}

/// Uniform doubles in `[0, 1)` from the top 53 bits of each `u64`.
struct Uniform(ChaCha8Rng);

impl Uniform {
    fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next();
        let u2 = self.next();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// One input of a generated spend, with its true age.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthRow {
    pub txid: Txid,
    pub input_index: u32,
    pub amount: Amount,
    pub true_age_seconds: i64,
    /// The coin being spent was planted as change.
    pub is_change: bool,
}

impl TruthRow {
    pub fn true_age_days(&self) -> f64 {
        self.true_age_seconds as f64 / SECONDS_PER_DAY as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundTruth {
    pub spends: Vec<TruthRow>,
    pub change_outputs: BTreeSet<OutPoint>,
    pub arrivals: Vec<Timestamp>,
    /// Realized holding times in days, in creation order.
    pub holds: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Coin {
    outpoint: OutPoint,
    amount: Amount,
    created_at: i64,
    address: String,
    is_change: bool,
}

#[derive(Clone, Debug)]
enum Event {
    Arrival,
    Spend(Coin),
}

struct Builder {
    seed: u64,
    counter: u64,
    next_addr: u64,
}

impl Builder {
    fn txid(&mut self) -> Txid {
        let mut h = Sha256::new();
        h.update(b"dormancy-synth");
        h.update(self.seed.to_le_bytes());
        h.update(self.counter.to_le_bytes());
        self.counter += 1;
        Txid::from_bytes(h.finalize().into())
    }

    fn address(&mut self) -> String {
        self.next_addr += 1;
        format!("addr{}", self.next_addr)
    }
}

fn arrival_times(config: &GenConfig, rng: &mut Uniform) -> Vec<i64> {
    let horizon_days = config.days as f64;
    let mut out = Vec::new();
    match config.arrival {
        Arrival::Constant { per_day } => {
            let mut k = 0u64;
            loop {
                let t = k as f64 / per_day;
                if t >= horizon_days {
                    break;
                }
                out.push(t);
                k += 1;
            }
        }
        Arrival::Poisson { rate_per_day } => {
            let mut t = 0.0;
            loop {
                t += -(1.0 - rng.next()).ln() / rate_per_day;
                if t >= horizon_days {
                    break;
                }
                out.push(t);
            }
        }
        Arrival::Ramp {
            start_per_day,
            end_per_day,
        } => {
            // thinning against the peak rate
            let peak = start_per_day.max(end_per_day);
            let mut t = 0.0;
            loop {
                t += -(1.0 - rng.next()).ln() / peak;
                if t >= horizon_days {
                    break;
                }
                let rate = start_per_day + (end_per_day - start_per_day) * t / horizon_days;
                if rng.next() * peak < rate {
                    out.push(t);
                }
            }
        }
    }
    out.into_iter()
        .map(|d| config.start_time + (d * SECONDS_PER_DAY as f64).floor() as i64)
        .collect()
}

struct EventQueue {
    heap: BinaryHeap<Reverse<(i64, u64)>>,
    events: Vec<Option<Event>>,
}

impl EventQueue {
    fn push(&mut self, time: i64, ev: Event) {
        let seq = self.events.len() as u64;
        self.events.push(Some(ev));
        self.heap.push(Reverse((time, seq)));
    }

    /// Earliest event; equal times pop in scheduling order.
    fn pop(&mut self) -> Option<(i64, Event)> {
        let Reverse((time, seq)) = self.heap.pop()?;
        let ev = self.events[seq as usize].take().expect("event popped once");
        Some((time, ev))
    }
}

fn sample_amount(dist: &AmountDist, rng: &mut Uniform) -> Amount {
    match *dist {
        AmountDist::Fixed { sats } => Amount::from_sats(sats),
        AmountDist::LogNormal { median_sats, sigma } => {
            let v = median_sats as f64 * (sigma * rng.standard_normal()).exp();
            Amount::from_sats((v.round() as u64).max(1))
        }
    }
}

/// Generate a time-sorted, replay-valid transaction stream and its ground
/// truth.
pub fn generate(config: &GenConfig) -> Result<(Vec<Transaction>, GroundTruth), SynthError> {
    config.validate()?;
    let mut rng = Uniform(ChaCha8Rng::seed_from_u64(config.seed));
    let mut ids = Builder {
        seed: config.seed,
        counter: 0,
        next_addr: 0,
    };
    let mut truth = GroundTruth::default();
    let mut txs = Vec::new();
    let mut queue = EventQueue {
        heap: BinaryHeap::new(),
        events: Vec::new(),
    };

    for t in arrival_times(config, &mut rng) {
        queue.push(t, Event::Arrival);
    }

    let hold_secs = |rng: &mut Uniform, truth: &mut GroundTruth| {
        let days = config.hold_time.sample_days(rng);
        let secs = (days * SECONDS_PER_DAY as f64).round() as i64;
        truth.holds.push(secs as f64 / SECONDS_PER_DAY as f64);
        secs
    };

    while let Some((time, ev)) = queue.pop() {
        let txid = ids.txid();
        match ev {
            Event::Arrival => {
                let amount = sample_amount(&config.amount, &mut rng);
                let address = ids.address();
                truth.arrivals.push(Timestamp::from_unix(time));
                let hold = hold_secs(&mut rng, &mut truth);
                queue.push(
                    time + hold,
                    Event::Spend(Coin {
                        outpoint: OutPoint { txid, vout: 0 },
                        amount,
                        created_at: time,
                        address: address.clone(),
                        is_change: false,
                    }),
                );
                txs.push(Transaction {
                    txid,
                    time: Timestamp::from_unix(time),
                    coinbase: true,
                    inputs: vec![],
                    outputs: vec![TxOut::new(amount, address)],
                });
            }
            Event::Spend(coin) => {
                truth.spends.push(TruthRow {
                    txid,
                    input_index: 0,
                    amount: coin.amount,
                    true_age_seconds: time - coin.created_at,
                    is_change: coin.is_change,
                });
                let payee = ids.address();
                let with_change = config.change_fraction > 0.0
                    && coin.amount.sats() >= 2
                    && rng.next() < config.change_fraction;
                let mut outputs = Vec::with_capacity(2);
                if with_change {
                    let sats = coin.amount.sats();
                    let split = 0.05 + 0.9 * rng.next();
                    let change = ((sats as f64 * split).round() as u64).clamp(1, sats - 1);
                    outputs.push(TxOut::new(Amount::from_sats(sats - change), payee));
                    outputs.push(TxOut::new(Amount::from_sats(change), coin.address.clone()));
                    let change_point = OutPoint { txid, vout: 1 };
                    truth.change_outputs.insert(change_point);
                    let hold = hold_secs(&mut rng, &mut truth);
                    queue.push(
                        time + hold,
                        Event::Spend(Coin {
                            outpoint: change_point,
                            amount: Amount::from_sats(change),
                            created_at: time,
                            address: coin.address,
                            is_change: true,
                        }),
                    );
                } else {
                    outputs.push(TxOut::new(coin.amount, payee));
                }
                txs.push(Transaction {
                    txid,
                    time: Timestamp::from_unix(time),
                    coinbase: false,
                    inputs: vec![coin.outpoint],
                    outputs,
                });
            }
        }
    }
    Ok((txs, truth))
}

fn fixture_txid(tag: &str, n: u8) -> Txid {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update([n]);
    Txid::from_bytes(h.finalize().into())
}

/// The worked example: Jill receives 10 BTC on day 0 and on day 5 pays
/// 2 BTC each to five people, who spend them one, two, ... five days later.
/// 80 coin-days over 20 BTC of volume, average dormancy 4 days.
pub fn jill() -> Vec<Transaction> {
    let noon = |day: i64| Timestamp::from_unix(DEFAULT_START + day * SECONDS_PER_DAY + 43_200);
    let btc = Amount::from_btc;
    let recipients = ["anya", "bob", "cai", "dave", "elena"];
    let mint = Transaction {
        txid: fixture_txid("jill", 0),
        time: noon(0),
        coinbase: true,
        inputs: vec![],
        outputs: vec![TxOut::new(btc(10), "jill")],
    };
    let split = Transaction {
        txid: fixture_txid("jill", 1),
        time: noon(5),
        coinbase: false,
        inputs: vec![mint.outpoint(0)],
        outputs: recipients.iter().map(|r| TxOut::new(btc(2), *r)).collect(),
    };
    let mut txs = vec![mint, split.clone()];
    for (i, who) in recipients.iter().enumerate() {
        txs.push(Transaction {
            txid: fixture_txid("jill", 2 + i as u8),
            time: noon(6 + i as i64),
            coinbase: false,
            inputs: vec![split.outpoint(i as u32)],
            outputs: vec![TxOut::new(btc(2), format!("{who}-shop"))],
        });
    }
    txs
}

/// Names accepted by [`scenario`].
pub const SCENARIOS: &[&str] = &["default", "jill", "stationary", "ramp", "exponential"];

/// Config behind a named random scenario; `None` for fixed fixtures such as
/// `jill`.
pub fn scenario_config(name: &str, seed: u64) -> Result<Option<GenConfig>, SynthError> {
    let btc = |n: u64| AmountDist::Fixed {
        sats: n * crate::ledger::SATS_PER_BTC,
    };
    let config = match name {
        "jill" => return Ok(None),
        "default" => GenConfig {
            seed,
            days: 120,
            start_time: DEFAULT_START,
            arrival: Arrival::Poisson { rate_per_day: 20.0 },
            hold_time: HoldTime::Mixture {
                components: vec![
                    MixtureComponent {
                        weight: 0.8,
                        dist: HoldTime::Exponential { mean_days: 5.0 },
                    },
                    MixtureComponent {
                        weight: 0.2,
                        dist: HoldTime::Exponential { mean_days: 60.0 },
                    },
                ],
            },
            amount: AmountDist::LogNormal {
                median_sats: 50_000_000,
                sigma: 1.5,
            },
            change_fraction: 0.3,
        },
        // lambda = 100 BTC/day, W = 10 days, L = 1000 BTC
        "stationary" => GenConfig {
            seed,
            days: 500,
            start_time: DEFAULT_START,
            arrival: Arrival::Poisson {
                rate_per_day: 100.0,
            },
            hold_time: HoldTime::Fixed { days: 10.0 },
            amount: btc(1),
            change_fraction: 0.0,
        },
        "ramp" => GenConfig {
            seed,
            days: 100,
            start_time: DEFAULT_START,
            arrival: Arrival::Ramp {
                start_per_day: 1.0,
                end_per_day: 200.0,
            },
            hold_time: HoldTime::Fixed { days: 10.0 },
            amount: btc(1),
            change_fraction: 0.0,
        },
        "exponential" => GenConfig {
            seed,
            days: 1000,
            start_time: DEFAULT_START,
            arrival: Arrival::Poisson { rate_per_day: 20.0 },
            hold_time: HoldTime::Exponential { mean_days: 10.0 },
            amount: btc(1),
            change_fraction: 0.0,
        },
        other => return Err(SynthError::UnknownScenario(other.to_string())),
    };
    Ok(Some(config))
}

/// Transactions (and ground truth, for random scenarios) of a named
/// scenario.
pub fn scenario(name: &str, seed: u64) -> Result<(Vec<Transaction>, GroundTruth), SynthError> {
    match scenario_config(name, seed)? {
        Some(config) => generate(&config),
        None => {
            let txs = jill();
            let mut truth = GroundTruth::default();
            let mut created = std::collections::HashMap::new();
            for tx in &txs {
                for (i, op) in tx.inputs.iter().enumerate() {
                    let (at, amount): (Timestamp, Amount) = created[op];
                    truth.spends.push(TruthRow {
                        txid: tx.txid,
                        input_index: i as u32,
                        amount,
                        true_age_seconds: tx.time.seconds_since(at),
                        is_change: false,
                    });
                }
                for (v, o) in tx.outputs.iter().enumerate() {
                    created.insert(tx.outpoint(v as u32), (tx.time, o.amount));
                }
                if tx.coinbase {
                    truth.arrivals.push(tx.time);
                }
            }
            Ok((txs, truth))
        }
    }
}
