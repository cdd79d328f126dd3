//! `ffent`: batch front end for the entanglement pipelines.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ChainEntropyArgs, CommutantArgs, CubeEntropyArgs, Merge, ScalingFitArgs, SchemeVerifyArgs};

#[derive(Debug, Parser)]
#[command(name = "ffent", version, about = "Free-fermion entanglement entropy on chains and hypercubes")]
struct Cli {
    /// JSON file with parameters for the subcommand; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy of the sites 0..=ell of a chain ground state (CSV)
    ChainEntropy(ChainEntropyArgs),
    /// Entries and spectrum of the tridiagonal commuting operator (CSV)
    Commutant(CommutantArgs),
    /// Hypercube ball entropy split over spin blocks (CSV)
    CubeEntropy(CubeEntropyArgs),
    /// Association scheme axioms and tables (JSON)
    SchemeVerify(SchemeVerifyArgs),
    /// Fit of the half-chain entropy against ln N (JSON, optional CSV residuals)
    ScalingFit(ScalingFitArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ffent::Error> for CliError {
    fn from(e: ffent::Error) -> Self {
        use ffent::Error::*;
        match e {
            InvalidInput(_) | NotAScheme { .. } => CliError::Usage(e.to_string()),
            NumericalBreakdown(_)
            | DegenerateFermiLevel { .. }
            | NotACommutant { .. }
            | DegenerateCommutant { .. }
            | NotPPolynomial(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::ChainEntropy(a) => commands::chain_entropy(a.merge(config::load(file, "chain-entropy")?)),
        Command::Commutant(a) => commands::commutant(a.merge(config::load(file, "commutant")?)),
        Command::CubeEntropy(a) => commands::cube_entropy(a.merge(config::load(file, "cube-entropy")?)),
        Command::SchemeVerify(a) => commands::scheme_verify(a.merge(config::load(file, "scheme-verify")?)),
        Command::ScalingFit(a) => commands::scaling_fit(a.merge(config::load(file, "scaling-fit")?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|text| match &output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ffent: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
