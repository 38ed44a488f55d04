//! `nirvana`: command-line front end for `nirvana-core`.
//!
//! Exit codes: 0 when every embedded check passes, 1 when a check fails,
//! 2 for unreadable or inconsistent input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "nirvana",
    version,
    about = "Factorizations of finite-dimensional quantum systems"
)]
struct Cli {
    /// Numerical tolerance for spectrum matching and decomposability tests.
    #[arg(long, global = true, env = "NIRVANA_TOL", default_value_t = 1e-9, value_parser = positive)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay the pointer/spin measurement in the entangling and the disentangled factorization.
    DemoMeasurement(DemoArgs),
    /// Split a spectrum into two additive factors, or report that none exists.
    DecomposeSpectrum(SpectrumArgs),
    /// Nearest local Hamiltonian and the interaction left over.
    LocalizeHamiltonian(LocalizeArgs),
    /// Static (eigenbasis) or dynamic (comoving) factorization with trivial evolution.
    Nirvana(NirvanaArgs),
    /// Numerical search for a factorization basis.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
struct Grid {
    #[arg(long, default_value_t = 0.0)]
    t_start: f64,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 101, value_parser = at_least_two)]
    samples: usize,
}

#[derive(Debug, Args)]
struct Split {
    /// Dimension of the first factor.
    #[arg(long)]
    p: usize,
    /// Dimension of the second factor.
    #[arg(long)]
    q: usize,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    grid: Grid,
    /// Directory for report.json and the per-factorization CSV files.
    #[arg(long, default_value = "demo-measurement")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// JSON array or whitespace/comma separated numbers.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    split: Split,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LocalizeArgs {
    /// Hamiltonian as a dense JSON matrix.
    #[arg(long)]
    input: PathBuf,
    /// Factorization JSON (split, basis, optional labels). Defaults to the
    /// standard basis under `--p`/`--q`.
    #[arg(long)]
    factorization: Option<PathBuf>,
    #[arg(long, requires = "q")]
    p: Option<usize>,
    #[arg(long, requires = "p")]
    q: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "mode", required = true, multiple = false)]
struct Mode {
    /// Eigenbasis factorization of a time-independent Hamiltonian.
    #[arg(long = "static")]
    static_mode: bool,
    /// Comoving factorization that follows the state.
    #[arg(long)]
    dynamic: bool,
}

#[derive(Debug, Args)]
struct NirvanaArgs {
    #[command(flatten)]
    mode: Mode,
    #[arg(long)]
    input: PathBuf,
    /// Initial state as a dense JSON vector; defaults to the uniform superposition.
    #[arg(long)]
    psi0: Option<PathBuf>,
    #[command(flatten)]
    split: Split,
    #[command(flatten)]
    grid: Grid,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    psi0: Option<PathBuf>,
    #[command(flatten)]
    split: Split,
    /// interaction-norm or mean-entropy.
    #[arg(long, default_value = "interaction-norm")]
    objective: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    learning_rate: f64,
    /// Sample times for mean-entropy.
    #[command(flatten)]
    grid: Grid,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn at_least_two(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("expected an integer ≥ 2, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(outcome) if outcome.failed.is_empty() => ExitCode::SUCCESS,
        Ok(outcome) => {
            for name in &outcome.failed {
                eprintln!("check failed: {name}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
