//! `ferro-zeros`: threshold sweeps, region clouds, zero-freeness sweeps,
//! approximation runs and oracle comparisons.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or regime error.

mod commands;
mod config;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad input, I/O trouble, or parameters outside the supported regime.
    Usage(String),
    /// The run completed but a check did not hold.
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<ferro_zeros::Error> for CliError {
    fn from(e: ferro_zeros::Error) -> Self {
        use ferro_zeros::Error as E;
        match e {
            E::RootsNotConverged { .. }
            | E::CoveringBudget { .. }
            | E::DegenerateStrip { .. }
            | E::RootOutsideRegion { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ferro-zeros", version, about = "Zero-free regions and approximation for ferromagnetic 2-spin systems")]
struct Cli {
    /// TOML file with defaults for any flag (keys spelled like the flags).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CSV of lambda_MCMC, d_c, lambda_c, d*, lambda* along a gamma sweep at fixed beta.
    Thresholds(ThresholdsArgs),
    /// JSON boundary clouds of K_d for each requested d.
    Regions(RegionsArgs),
    /// Root-locus sweep over random min-degree-2 graphs; JSON summary.
    Verify(VerifyArgs),
    /// Approximate Z(G; lambda) and compare with enumeration when small enough.
    Approx(ApproxArgs),
    /// CSV comparing the numerical product-program minimum with lambda*_d.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma_lo: Option<f64>,
    #[arg(long)]
    pub gamma_hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',')]
    pub d_list: Option<Vec<usize>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict the sweep to one parameter pair (needs --gamma too).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub deg_max: Option<usize>,
    /// Strip end as a multiple of lambda*.
    #[arg(long)]
    pub safety: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Edge-list file: "n m" then one "u v" per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// One field per line ("re" or "re im"); overrides --lambda.
    #[arg(long)]
    pub fields: Option<PathBuf>,
    /// Uniform field.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub d_max: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Thresholds(a) => commands::thresholds(a, &file),
        Command::Regions(a) => commands::regions(a, &file),
        Command::Verify(a) => commands::verify(a, &file),
        Command::Approx(a) => commands::approx(a, &file),
        Command::Oracle(a) => commands::oracle(a, &file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Failure(msg) => eprintln!("FAIL: {msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
