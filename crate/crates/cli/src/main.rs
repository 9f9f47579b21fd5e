use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;

#[derive(Parser, Debug)]
#[command(
    name = "dormancy",
    about = "Coin-days destroyed, average dormancy and turnover from UTXO ledgers",
    disable_version_flag = true,
    subcommand_required = false,
    arg_required_else_help = true
)]
struct Cli {
    /// Print tool, fixture-set and generator versions.
    #[arg(long)]
    version: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Replay a JSON Lines ledger into spend-record CSV.
    Replay {
        #[command(flatten)]
        io: InOut,
        #[arg(long, default_value = "fractional")]
        age_mode: String,
    },
    /// Trailing-window dormancy and turnover CSV from spend records.
    Metrics {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        records: RecordOpts,
        /// Trailing window in days (1, 30, 90 or any positive count).
        #[arg(long, default_value_t = 30)]
        window: u32,
    },
    /// Little's Law report (JSON) for a date range.
    Littles {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        records: RecordOpts,
        /// Inclusive range YYYY-MM-DD..YYYY-MM-DD; defaults to all records.
        #[arg(long)]
        range: Option<String>,
        #[arg(long, default_value_t = 4)]
        segments: usize,
        #[arg(long, default_value_t = 0.25)]
        tol: f64,
        /// The ledger is closed (every coin of interest is eventually
        /// spent): also report the measured in-flight pool.
        #[arg(long)]
        closed: bool,
    },
    /// Daily max-transaction share of coin-days destroyed (CSV).
    Skew {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        records: RecordOpts,
        /// Also print the median share over this range to stderr.
        #[arg(long)]
        median: Option<String>,
    },
    /// Effect of one hypothetical spend on a window's dormancy (JSON).
    Whatif {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        records: RecordOpts,
        #[arg(long)]
        volume_sats: u64,
        #[arg(long)]
        age_days: f64,
        #[arg(long)]
        range: Option<String>,
    },
    /// Generate a synthetic ledger (JSON Lines).
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Named scenario: default, jill, stationary, ramp, exponential.
        #[arg(long, conflicts_with = "config")]
        scenario: Option<String>,
        /// JSON generator config; its seed is replaced by --seed when given.
        #[arg(long)]
        config: Option<String>,
        /// Write ground truth CSV here.
        #[arg(long)]
        truth: Option<String>,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Correlate a dormancy CSV with daily USD/BTC prices (JSON).
    Correlate {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        prices: String,
        #[arg(long)]
        threshold_usd: Option<f64>,
        #[arg(long, default_value = "pearson")]
        method: String,
    },
}

#[derive(Args, Debug)]
struct InOut {
    /// Input path, `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Output path, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args, Debug)]
struct RecordOpts {
    #[arg(long, default_value = "fractional")]
    age_mode: String,
    /// Drop change outputs (address-equality heuristic) from volume.
    #[arg(long)]
    exclude_change: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.version {
        println!("{}", commands::version_line());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(1);
    };
    match commands::run(command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
