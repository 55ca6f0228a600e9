//! Command-line front end for coherent-state fidelity limits: bound tables,
//! parameter sweeps, closed-form-vs-oracle verification, and certification
//! of experimental fidelity datasets.
//!
//! Exit codes: 0 success, 1 failed check or flagged verdict, 2 usage error.

mod bounds;
mod certify;
mod sweep;
mod util;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use util::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated values (or a plain-text report for `verify`).
    Csv,
    /// Pretty-printed JSON.
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "fidelim",
    version,
    about = "Fidelity limits for coherent-state amplification and conjugation: \
             bound tables, sweeps, oracle verification, and dataset certification"
)]
pub struct Cli {
    /// Output format for artifacts and reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Seed for every stochastic component (dataset generation, Monte Carlo
    /// self-checks, bootstrap).
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Number-basis truncation dimension for oracle routes.
    #[arg(long, global = true, default_value_t = fidelim::DEFAULT_FOCK_DIM)]
    pub dim: usize,
    /// Radial quadrature nodes for prior averages.
    #[arg(long, global = true, default_value_t = fidelim::DEFAULT_RADIAL_NODES)]
    pub nodes: usize,
    /// Write the artifact to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the fidelity limit for one task with its attaining channel.
    Bounds(bounds::BoundsArgs),
    /// Evaluate channels against limits over a task grid.
    Sweep(sweep::SweepArgs),
    /// Run the closed-form-vs-oracle check suite.
    Verify(verify::VerifyArgs),
    /// Certify a fidelity dataset against the limits (or generate one).
    Certify(certify::CertifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bounds(args) => bounds::run(&cli, args),
        Command::Sweep(args) => sweep::run(&cli, args),
        Command::Verify(args) => verify::run(&cli, args),
        Command::Certify(args) => certify::run(&cli, args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
