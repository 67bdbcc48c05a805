//! `frontfix` command-line driver: solves, extrapolation tableaux,
//! tolerance-driven refinement, stability scans and price tables, written
//! as plot-ready CSV and JSON files.
//!
//! Log verbosity follows `RUST_LOG` (default `warn`).

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "frontfix",
    version,
    about = "Front-fixing finite-difference pricer for American puts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve once; writes surface.csv, front.csv and summary.json.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Time-step ratio dtau / dx^2.
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Repeated extrapolation of the final front over J, 2J, ..., 2^G J;
    /// writes tableau.csv.
    Extrapolate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mu: Option<f64>,
        /// Number of doublings G.
        #[arg(long, default_value_t = 5)]
        levels: usize,
    },
    /// Double J until the estimated errors fall below eps; writes
    /// refine_report.json and errors_g<G>.csv for the accepted pair.
    Refine {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mu: Option<f64>,
        /// Error tolerance.
        #[arg(long, default_value_t = 0.005)]
        eps: f64,
        /// Maximum number of (J, 2J) comparisons.
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Von Neumann amplification moduli over the phase range [0, pi] for
    /// each mu; writes stability.csv and stability_summary.json.
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated list of time-step ratios.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        mu: Vec<f64>,
    },
    /// Option prices at the given asset levels; writes prices.csv.
    Price {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mu: Option<f64>,
        /// Comma-separated asset prices.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        assets: Vec<f64>,
        /// Add prices extrapolated from the (J, 2J) pair.
        #[arg(long)]
        extrapolate: bool,
        /// Add the shipped reference columns.
        #[arg(long)]
        reference: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { common, mu } => commands::solve(&RunConfig::resolve(&common, mu, 80)?),
        Command::Extrapolate { common, mu, levels } => {
            commands::extrapolate(&RunConfig::resolve(&common, mu, 10)?, levels)
        }
        Command::Refine {
            common,
            mu,
            eps,
            levels,
        } => commands::refine(&RunConfig::resolve(&common, mu, 5)?, eps, levels),
        Command::Stability { common, mu } => {
            let cfg = RunConfig::resolve(&common, mu.first().copied(), 80)?;
            commands::stability(&cfg, &mu)
        }
        Command::Price {
            common,
            mu,
            assets,
            extrapolate,
            reference,
        } => commands::price(&RunConfig::resolve(&common, mu, 50)?, &assets, extrapolate, reference),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
