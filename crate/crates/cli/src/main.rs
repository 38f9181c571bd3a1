mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nonlocal_core::config::DEFAULT_BUDGET;

#[derive(Debug, Parser)]
#[command(name = "nonlocal", version, about = "Classical and quantum bounds of bipartite Bell functionals")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest exact enumeration (strategies or local points).
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Normalization, non-signalling and LP tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Omit the `meta` block (version and timestamp) from reports.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_meta: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a constructed functional or a preset functional/behavior.
    Construct(commands::ConstructArgs),
    /// Classical bound of a functional.
    Classical(commands::ClassicalArgs),
    /// See-saw quantum value, violation ratio and optional dimension table.
    Quantum(commands::QuantumArgs),
    /// ν(P) and its local decomposition.
    Nu(commands::BehaviorArgs),
    /// Noise robustness π(P), checked against ν.
    Pi(commands::BehaviorArgs),
    /// Detector inefficiency applied to a behavior.
    Noise(commands::NoiseArgs),
    /// See-saw values across local dimensions.
    Witness(commands::WitnessArgs),
    /// Monte Carlo and identity verifiers.
    #[command(subcommand)]
    Verify(commands::VerifyCommand),
    /// Full construction pipeline over one or more seeds.
    Pipeline(commands::PipelineArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: could not configure {jobs} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
