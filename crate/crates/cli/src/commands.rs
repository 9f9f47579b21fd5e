use std::fs::File;
use std::io::{stdin, stdout, BufRead, BufReader, BufWriter, Read, Write};

use dormancy_core::correlate::{correlate, Method};
use dormancy_core::io;
use dormancy_core::ledger::{replay, AgeMode, Amount, SpendRecord};
use dormancy_core::metrics::{bucketize, dormancy_series, DailyBucket};
use dormancy_core::queueing::{littles_estimate, measured_pool_btc, StationarityParams};
use dormancy_core::synth::{self, GenConfig, FIXTURE_SET_VERSION, GENERATOR_VERSION};
use dormancy_core::tail::{max_share_series, median_share, whatif_spend, WindowTotals};
use dormancy_core::DateWindow;

use crate::error::CliError;
use crate::{Command, InOut, RecordOpts};

pub fn version_line() -> String {
    format!(
        "dormancy {} (fixture set {FIXTURE_SET_VERSION}, generator {GENERATOR_VERSION})",
        env!("CARGO_PKG_VERSION")
    )
}

fn open_input(path: &str) -> Result<Box<dyn BufRead>, CliError> {
    if path == "-" {
        Ok(Box::new(BufReader::new(stdin().lock())))
    } else {
        let f = File::open(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        Ok(Box::new(BufReader::new(f)))
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, CliError> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(stdout().lock())))
    } else {
        let f = File::create(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn write_json<T: serde::Serialize>(path: &str, value: &T) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    serde_json::to_writer(&mut out, value).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn age_mode(s: &str) -> Result<AgeMode, CliError> {
    s.parse().map_err(CliError::Validation)
}

/// Spend records from CSV, re-weighted under the requested age mode and
/// optionally with change removed from volume.
fn load_records(input: &str, opts: &RecordOpts) -> Result<Vec<SpendRecord>, CliError> {
    let mode = age_mode(&opts.age_mode)?;
    let records = io::read_records(open_input(input)?)?;
    Ok(records
        .into_iter()
        .map(|r| {
            let r = r.with_mode(mode);
            if opts.exclude_change {
                r.excluding_change()
            } else {
                r
            }
        })
        .collect())
}

fn full_range(buckets: &[DailyBucket]) -> Result<DateWindow, CliError> {
    match (buckets.first(), buckets.last()) {
        (Some(a), Some(b)) => Ok(DateWindow::new(a.day, b.day)?),
        _ => Err(CliError::Validation("no spend records".into())),
    }
}

fn range_or_full(range: Option<&str>, buckets: &[DailyBucket]) -> Result<DateWindow, CliError> {
    match range {
        Some(r) => Ok(r.parse()?),
        None => full_range(buckets),
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Replay {
            io: InOut { input, output },
            age_mode: mode,
        } => {
            let mode = age_mode(&mode)?;
            let txs = io::read_ledger(open_input(&input)?)?;
            let result = replay(&txs, mode)?;
            io::write_records(open_output(&output)?, &result.records)?;
        }
        Command::Metrics {
            io: InOut { input, output },
            records,
            window,
        } => {
            let records = load_records(&input, &records)?;
            let points = dormancy_series(&bucketize(&records), window)?;
            io::write_dormancy_csv(open_output(&output)?, &points)?;
        }
        Command::Littles {
            io: InOut { input, output },
            records,
            range,
            segments,
            tol,
            closed,
        } => {
            let records = load_records(&input, &records)?;
            let buckets = bucketize(&records);
            let window = range_or_full(range.as_deref(), &buckets)?;
            let mut report =
                littles_estimate(&buckets, window, StationarityParams { segments, tol })?;
            if closed {
                report = report.with_measured_pool(measured_pool_btc(&records, window));
            }
            write_json(&output, &report)?;
        }
        Command::Skew {
            io: InOut { input, output },
            records,
            median,
        } => {
            let records = load_records(&input, &records)?;
            let points = max_share_series(&bucketize(&records));
            io::write_max_share_csv(open_output(&output)?, &points)?;
            if let Some(range) = median {
                let range: DateWindow = range.parse()?;
                let m = median_share(&points, range)?;
                eprintln!("median_share {range} {m}");
            }
        }
        Command::Whatif {
            io: InOut { input, output },
            records,
            volume_sats,
            age_days,
            range,
        } => {
            let records = load_records(&input, &records)?;
            let buckets = bucketize(&records);
            let window = range_or_full(range.as_deref(), &buckets)?;
            let totals = WindowTotals::from_buckets(&buckets, window);
            let impact = whatif_spend(&totals, Amount::from_sats(volume_sats), age_days)?;
            write_json(&output, &impact)?;
        }
        Command::Synth {
            seed,
            scenario,
            config,
            truth,
            output,
        } => {
            let (txs, ground_truth) = match config {
                Some(path) => {
                    let mut text = String::new();
                    open_input(&path)?.read_to_string(&mut text)?;
                    let mut cfg: GenConfig = serde_json::from_str(&text)?;
                    cfg.seed = seed;
                    synth::generate(&cfg)?
                }
                None => synth::scenario(scenario.as_deref().unwrap_or("default"), seed)?,
            };
            io::write_ledger(open_output(&output)?, &txs)?;
            if let Some(path) = truth {
                io::write_truth_csv(open_output(&path)?, &ground_truth)?;
            }
        }
        Command::Correlate {
            io: InOut { input, output },
            prices,
            threshold_usd,
            method,
        } => {
            let method = match method.as_str() {
                "pearson" => Method::Pearson,
                "spearman" => Method::Spearman,
                other => {
                    return Err(CliError::Validation(format!(
                        "unknown method {other:?} (expected pearson or spearman)"
                    )))
                }
            };
            let series: Vec<_> = io::read_dormancy_csv(open_input(&input)?)?
                .into_iter()
                .filter_map(|(d, v)| v.map(|v| (d, v)))
                .collect();
            let prices = io::load_prices(open_input(&prices)?)?;
            let report = correlate(&series, &prices, threshold_usd, method)?;
            write_json(&output, &report)?;
        }
    }
    Ok(())
}
