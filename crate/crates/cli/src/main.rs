//! `zqvae` — config-driven command line for the quantum autoencoder toolkit:
//! dataset generation, training runs and sweeps, property-check suites, and
//! run-directory reports.
//!
//! Exit codes: 0 ok, 1 validation, 2 runtime, 3 property-suite failure.

mod check;
mod gen;
mod report;
mod train;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use zqvae_core::Error;

#[derive(Parser)]
#[command(name = "zqvae", version, about = "Quantum autoencoder toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate (or convert) a dataset bundle
    Gen(gen::GenArgs),
    /// Train a model per the run config; writes a run directory
    Train(train::TrainArgs),
    /// Run the property-check suites
    Check(check::CheckArgs),
    /// Aggregate completed run directories into CSV/JSON tables
    Report(report::ReportArgs),
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Invalid(_) | Error::DimMismatch(_) => 1,
        _ => 2,
    }
}

/// `ZQVAE_THREADS` caps the global worker pool (default: all cores).
fn apply_thread_cap() -> Result<(), Error> {
    match std::env::var("ZQVAE_THREADS") {
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    Error::Config(format!("ZQVAE_THREADS must be a positive integer, got {raw:?}"))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))
        }
        Err(_) => Ok(()),
    }
}

fn main() {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = apply_thread_cap() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
    let outcome = match cli.command {
        Cmd::Gen(args) => gen::run(args),
        Cmd::Train(args) => train::run(args),
        Cmd::Check(args) => check::run(args),
        Cmd::Report(args) => report::run(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
