//! Command-line front end for the nearest-neighbor forecasting library.
//!
//! Subcommands: `preprocess` (outlier pass), `tune` (grid-search p and k
//! per horizon), `forecast` (future points with explicit p and k), and
//! `compare` (score methods on shared rolling-origin folds).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 infeasible
//! configuration.

use clap::{Parser, Subcommand};

use wnn_cli::config::RawOptions;
use wnn_cli::{commands, CliError};

#[derive(Parser)]
#[command(
    name = "wnn",
    version,
    about = "Weighted nearest-neighbor time-series forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect and adjust outliers, writing the adjusted series.
    Preprocess {
        #[command(flatten)]
        opts: RawOptions,
    },
    /// Grid-search (p, k) per horizon and emit benchmark records.
    Tune {
        #[command(flatten)]
        opts: RawOptions,
    },
    /// Forecast future points with an explicit window and neighbor count.
    Forecast {
        #[command(flatten)]
        opts: RawOptions,
        /// Window length (points for cpto, blocks for fpto).
        #[arg(long)]
        p: usize,
        /// Neighbor count.
        #[arg(long)]
        k: usize,
    },
    /// Score methods on shared rolling-origin folds.
    Compare {
        #[command(flatten)]
        opts: RawOptions,
        /// Comma-separated subset of: cpto, fpto, hw, naive.
        #[arg(long)]
        methods: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Preprocess { opts } => {
            // The horizon is irrelevant here; accept any or none.
            let cfg = opts.resolve(Some(vec![1]))?;
            commands::cmd_preprocess(&cfg)
        }
        Command::Tune { opts } => {
            let cfg = opts.resolve(Some((1..=10).collect()))?;
            commands::cmd_tune(&cfg)
        }
        Command::Forecast { opts, p, k } => {
            let cfg = opts.resolve(None)?;
            if p == 0 || k == 0 {
                return Err(CliError::usage("--p and --k must be >= 1".into()));
            }
            commands::cmd_forecast(&cfg, p, k)
        }
        Command::Compare { opts, methods } => {
            let cfg = opts.resolve(Some((1..=10).collect()))?;
            commands::cmd_compare(&cfg, methods.as_deref())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            e.print().expect("stderr available");
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}
