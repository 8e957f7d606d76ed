//! `qfivol verify` — seeded random verification campaigns.
//!
//! Exit codes: 0 all trials pass, 1 at least one trial fails, 2 for
//! configuration or I/O problems. Thread count is controlled only by the
//! QFIVOL_THREADS environment variable.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qfivol::campaign::{configure_threads, run_campaign, CampaignMode, TrialConfig};
use qfivol::monotone::parse_catalog_list;
use qfivol::report::{emit_report, ReportFormat};

#[derive(Parser)]
#[command(name = "qfivol", version, about = "QFI uncertainty-volume verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification campaign and emit a JSON or CSV report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// INEQUALITY | IDENTITY | ORACLE | MONOTONICITY | EQUALITY |
    /// PAULI_CHAIN | COMMUTING | PURE_LIMIT (case-insensitive)
    #[arg(long)]
    mode: String,

    /// State dimension n.
    #[arg(long, default_value_t = 3)]
    n: usize,

    /// Number of observables N.
    #[arg(long = "N", default_value_t = 2)]
    n_obs: usize,

    /// Number of seeded trials.
    #[arg(long, default_value_t = 20)]
    trials: u64,

    /// Base seed; trial t uses ChaCha8 stream t of this seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated monotone functions, e.g. "sld,wy,wyd:0.25".
    #[arg(long, default_value = "sld,wy,wyd:0.25")]
    f: String,

    /// Pass/fail tolerance for the mode's residual.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Smallest eigenvalue accepted when drawing faithful states.
    #[arg(long = "floor", default_value_t = 1e-3)]
    floor: f64,

    /// json | csv
    #[arg(long, default_value = "json")]
    format: String,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Rerun a single trial by its seed offset.
    #[arg(long, value_name = "SEED_OFFSET")]
    replay: Option<u64>,
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var("QFIVOL_THREADS") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("QFIVOL_THREADS must be a positive integer, got {raw:?}")),
        Err(_) => Ok(None),
    }
}

fn run(args: &VerifyArgs) -> Result<bool, String> {
    let threads = threads_from_env()?;
    configure_threads(threads).map_err(|e| e.to_string())?;

    let mode: CampaignMode = args.mode.parse().map_err(|e: qfivol::Error| e.to_string())?;
    let functions = parse_catalog_list(&args.f).map_err(|e| e.to_string())?;
    let format: ReportFormat = args.format.parse().map_err(|e: qfivol::Error| e.to_string())?;

    let config = TrialConfig {
        mode,
        dim: args.n,
        n_obs: args.n_obs,
        trials: args.trials,
        seed: args.seed,
        functions,
        tol: args.tol,
        floor: args.floor,
        replay: args.replay,
    };

    let report = run_campaign(&config).map_err(|e| e.to_string())?;
    let rendered = emit_report(&report, format, args.out.as_deref()).map_err(|e| e.to_string())?;
    if args.out.is_none() {
        print!("{rendered}");
    }
    Ok(report.aggregate.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Verify(args) = cli.command;
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
