//! Front end for the `loqc` binary: circuit files, gate verification and design-space
//! searches, all reported as JSON.

pub mod circuit;
pub mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use circuit::{parse_circuit, CircuitFile, ParseError};

#[derive(Debug, Parser)]
#[command(
    name = "loqc",
    version,
    about = "Linear-optical gate simulator and postcorrection search"
)]
pub struct Cli {
    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a circuit description file.
    Simulate { file: PathBuf },
    /// Truth table and success probability of a built-in gate.
    VerifyGate {
        /// One of ns, cs, cnot_klm, cnot_2photon.
        name: String,
    },
    /// Feasibility scan or optimization over beam-splitter angles.
    Search {
        /// One of single_bs:case1, single_bs:case3, two_bs:case3, ns_in_ns:case1, optimize_ns.
        scheme: String,
        /// Coarse grid step in radians.
        #[arg(long)]
        grid_step: Option<f64>,
        /// Largest residual counted as feasible.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Randomized consistency checks of the simulator.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cases per check.
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: loqc_core::Error,
    },
    /// Checks that ran but did not hold.
    #[error("{0}")]
    Failed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}

/// Runs a parsed command line and returns the text for standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let digits = report::digits_from_env();
    match &cli.command {
        Command::Simulate { file } => commands::simulate(file, cli.pretty, digits),
        Command::VerifyGate { name } => commands::verify_gate(name, cli.pretty, digits),
        Command::Search {
            scheme,
            grid_step,
            tolerance,
        } => commands::search(scheme, *grid_step, *tolerance, cli.pretty, digits),
        Command::Selftest { seed, cases } => commands::selftest(*seed, *cases, cli.pretty, digits),
    }
}
