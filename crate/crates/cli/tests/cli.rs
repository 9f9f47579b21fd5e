use std::io::Write;
use std::process::{Command, Stdio};

use dormancy_core::io::{write_dormancy_csv, write_ledger, write_records};
use dormancy_core::ledger::replay;
use dormancy_core::metrics::{bucketize, dormancy_series};
use dormancy_core::synth;
use dormancy_core::AgeMode;

struct Out {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

impl Out {
    fn text(&self) -> &str {
        std::str::from_utf8(&self.stdout).unwrap()
    }
}

fn run(args: &[&str], stdin: &[u8]) -> Out {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dormancy"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    let out = child.wait_with_output().unwrap();
    Out {
        code: out.status.code().unwrap(),
        stdout: out.stdout,
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let out = run(args, stdin);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout
}

fn jill_records() -> Vec<u8> {
    let ledger = ok(&["synth", "--scenario", "jill"], b"");
    ok(&["replay"], &ledger)
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    for args in [&[][..], &["frobnicate"][..], &["metrics", "--bogus"][..]] {
        let out = run(args, b"");
        assert_eq!(out.code, 1, "{args:?}");
        assert!(
            out.stderr.contains("Usage") || out.text().contains("Usage"),
            "{args:?}: {}",
            out.stderr
        );
    }
    assert_eq!(run(&["metrics", "--window", "x"], b"").code, 1);
    assert_eq!(run(&["--help"], b"").code, 0);
}

#[test]
fn io_errors_exit_two_and_validation_one() {
    assert_eq!(run(&["replay", "/nonexistent/ledger.jsonl"], b"").code, 2);
    assert_eq!(run(&["replay"], b"{not json}\n").code, 1);
    let ledger = ok(&["synth", "--scenario", "jill"], b"");
    let text = String::from_utf8(ledger).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(0, 1);
    let out = run(&["replay"], lines.join("\n").as_bytes());
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
    assert_eq!(
        run(&["metrics", "--age-mode", "weekly"], &jill_records()).code,
        1
    );
    assert_eq!(run(&["synth", "--scenario", "nope"], b"").code, 1);
}

#[test]
fn version_names_fixture_set() {
    let out = ok(&["--version"], b"");
    let line = String::from_utf8(out).unwrap();
    assert!(line.starts_with("dormancy "));
    assert!(line.contains("fixture set 1"));
    assert!(line.contains("chacha8-v1"));
}

#[test]
fn jill_metrics_ends_at_four_days() {
    let csv = ok(&["metrics", "--window", "30"], &jill_records());
    let text = String::from_utf8(csv).unwrap();
    assert!(
        text.starts_with("date,window_days,volume_sats,coin_days,dormancy_days,turnover_annual\n")
    );
    let last_defined = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap())
        .filter(|v| !v.is_empty())
        .last()
        .unwrap();
    assert_eq!(last_defined.parse::<f64>().unwrap(), 4.0);
}

#[test]
fn pipeline_matches_in_process() {
    for scenario in ["jill", "default"] {
        let ledger = ok(&["synth", "--scenario", scenario, "--seed", "5"], b"");
        let records = ok(&["replay"], &ledger);
        let csv = ok(&["metrics", "--window", "30"], &records);

        let (txs, _) = synth::scenario(scenario, 5).unwrap();
        let mut want_ledger = Vec::new();
        write_ledger(&mut want_ledger, &txs).unwrap();
        assert_eq!(ledger, want_ledger);
        let recs = replay(&txs, AgeMode::Fractional).unwrap().records;
        let mut want_records = Vec::new();
        write_records(&mut want_records, &recs).unwrap();
        assert_eq!(records, want_records);
        let mut want = Vec::new();
        write_dormancy_csv(&mut want, &dormancy_series(&bucketize(&recs), 30).unwrap()).unwrap();
        assert_eq!(csv, want, "{scenario}");
    }
}

#[test]
fn whatif_zero_volume_is_identity() {
    let out = json(&ok(
        &["whatif", "--volume-sats", "0", "--age-days", "100"],
        &jill_records(),
    ));
    assert_eq!(out["new_dormancy"], out["baseline_dormancy"]);
    assert_eq!(out["baseline_dormancy"], 4.0);
    let out = json(&ok(
        &["whatif", "--volume-sats", "1000000000", "--age-days", "12"],
        &jill_records(),
    ));
    assert!((out["new_dormancy"].as_f64().unwrap() - 200.0 / 30.0).abs() < 1e-9);
}

#[test]
fn littles_report_fields() {
    let out = json(&ok(&["littles", "--closed"], &jill_records()));
    for key in [
        "lambda_btc_per_day",
        "w_days",
        "l_btc",
        "measured_pool_btc",
        "stationary",
        "drift_stat",
    ] {
        assert!(out.get(key).is_some(), "missing {key}");
    }
    assert_eq!(out["w_days"], 4.0);
    let open = json(&ok(
        &[
            "littles",
            "--range",
            "2017-01-05..2017-01-11",
            "--segments",
            "2",
        ],
        &jill_records(),
    ));
    assert!(open["measured_pool_btc"].is_null());
    assert_eq!(open["window_days"], 7);
    assert_eq!(
        run(
            &["littles", "--range", "2018-01-01..2018-01-31"],
            &jill_records()
        )
        .code,
        1
    );
}

#[test]
fn skew_writes_csv_and_median() {
    let out = run(
        &["skew", "--median", "2017-01-06..2017-01-11"],
        &jill_records(),
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out
        .text()
        .starts_with("date,share,max_txid,total_coin_days\n"));
    assert!(out.stderr.contains("median_share"), "{}", out.stderr);
    assert!(out.stderr.trim_end().ends_with(" 1"));
}

#[test]
fn files_flags_and_options() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("l.jsonl");
    let truth = dir.path().join("truth.csv");
    let records = dir.path().join("r.csv");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 0, "days": 20, "arrival": {"kind": "poisson", "rate_per_day": 10.0},
            "hold_time": {"kind": "fixed", "days": 3.0},
            "amount": {"kind": "fixed", "sats": 100000000}, "change_fraction": 0.5}"#,
    )
    .unwrap();
    let p = |x: &std::path::Path| x.to_str().unwrap().to_string();
    ok(
        &[
            "synth",
            "--config",
            &p(&cfg),
            "--seed",
            "3",
            "--truth",
            &p(&truth),
            "-o",
            &p(&ledger),
        ],
        b"",
    );
    let truth_text = std::fs::read_to_string(&truth).unwrap();
    assert!(truth_text.starts_with("txid,input_index,true_age_days,is_change\n"));
    assert!(truth_text.contains(",true\n"));
    ok(&["replay", &p(&ledger), "--output", &p(&records)], b"");

    let all = ok(&["metrics", &p(&records), "--window", "1"], b"");
    let no_change = ok(
        &["metrics", &p(&records), "--window", "1", "--exclude-change"],
        b"",
    );
    assert_ne!(all, no_change);
    let integral = ok(
        &[
            "metrics",
            &p(&records),
            "--window",
            "90",
            "--age-mode",
            "integral",
        ],
        b"",
    );
    let last = String::from_utf8(integral)
        .unwrap()
        .lines()
        .last()
        .unwrap()
        .to_string();
    // every hold is exactly three days
    assert_eq!(last.split(',').nth(4), Some("3"));

    let dorm = dir.path().join("d.csv");
    let prices = dir.path().join("p.csv");
    let varied = ok(
        &["replay"],
        &ok(&["synth", "--scenario", "default", "--seed", "3"], b""),
    );
    std::fs::write(&dorm, ok(&["metrics", "--window", "1"], &varied)).unwrap();
    let mut price_csv = String::from("date,usd_per_btc\n");
    for d in 0..200 {
        let day = chrono::NaiveDate::from_ymd_opt(2017, 1, 1).unwrap() + chrono::Days::new(d);
        price_csv.push_str(&format!("{},{}\n", day, 900 + 17 * d * d % 400));
    }
    std::fs::write(&prices, price_csv).unwrap();
    let r = json(&ok(
        &[
            "correlate",
            &p(&dorm),
            "--prices",
            &p(&prices),
            "--threshold-usd",
            "1000",
        ],
        b"",
    ));
    assert!(r["n"].as_u64().unwrap() >= 2);
    assert_eq!(r["threshold_usd"], 1000.0);
    assert_eq!(
        run(
            &["correlate", &p(&dorm), "--prices", "/nonexistent.csv"],
            b""
        )
        .code,
        2
    );
    assert_eq!(
        run(
            &[
                "correlate",
                &p(&dorm),
                "--prices",
                &p(&prices),
                "--method",
                "kendall"
            ],
            b""
        )
        .code,
        1
    );
}
