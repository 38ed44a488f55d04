use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nirvana_core::dynamics::{linspace, PiecewiseHamiltonian};
use nirvana_core::factorize::{
    dynamic_nirvana_factorization, nearest_local_decomposition, optimize_factorization,
    static_nirvana_factorization, static_story, sumset_decompose, Check, FactorizationReport,
    Objective, OptimizerOptions, SpectrumDecomposition,
};
use nirvana_core::hilbert::{
    frobenius, partial_trace_matrix, CVector, Complex64, Factorization, Operator, State,
    TensorSplit, TOL,
};
use nirvana_core::io::{parse_spectrum, read_json, to_json_string, DenseJson, FactorizationJson};
use nirvana_core::scenarios::measurement_demo;
use serde::Serialize;

use crate::{Cli, Command, Grid, LocalizeArgs, NirvanaArgs, OptimizeArgs, SpectrumArgs, Split};

/// Names of the checks that failed; empty means success.
pub struct Outcome {
    pub failed: Vec<String>,
}

impl Outcome {
    fn from_checks<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Self {
        Self {
            failed: checks
                .into_iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .collect(),
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let tol = cli.tol;
    match cli.command {
        Command::DemoMeasurement(args) => {
            let demo = measurement_demo(args.grid.t_start, args.grid.t_end, args.grid.samples)?;
            demo.write_to(&args.output)
                .with_context(|| format!("writing {}", args.output.display()))?;
            Ok(Outcome::from_checks(&demo.checks))
        }
        Command::DecomposeSpectrum(args) => decompose_spectrum(args, tol),
        Command::LocalizeHamiltonian(args) => localize(args),
        Command::Nirvana(args) => nirvana(args, tol),
        Command::Optimize(args) => optimize(args),
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let text = to_json_string(value)?;
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read_hamiltonian(path: &Path) -> Result<Operator> {
    let dense: DenseJson =
        read_json(path).with_context(|| format!("reading {}", path.display()))?;
    dense
        .to_hermitian()
        .with_context(|| format!("{} is not a hermitian matrix", path.display()))
}

fn read_state(path: Option<&Path>, dim: usize) -> Result<State> {
    let psi = match path {
        Some(path) => {
            let dense: DenseJson =
                read_json(path).with_context(|| format!("reading {}", path.display()))?;
            dense
                .to_state()
                .with_context(|| format!("{} is not a unit vector", path.display()))?
        }
        None => State::normalized(CVector::from_element(dim, Complex64::from(1.0)))?,
    };
    if psi.dim() != dim {
        bail!(
            "initial state has dimension {}, Hamiltonian has {dim}",
            psi.dim()
        );
    }
    Ok(psi)
}

fn split_for(split: &Split, dim: usize) -> Result<TensorSplit> {
    let s = TensorSplit::bipartite(split.p, split.q)?;
    s.check_dim(dim)?;
    Ok(s)
}

fn grid_times(grid: &Grid) -> Result<Vec<f64>> {
    if !(grid.t_start < grid.t_end) {
        bail!("--t-start must be below --t-end");
    }
    Ok(linspace(grid.t_start, grid.t_end, grid.samples)?)
}

#[derive(Serialize)]
struct SpectrumOutput {
    /// `decomposable` or `none`.
    result: &'static str,
    split: [usize; 2],
    tol: f64,
    factors: Option<Vec<Vec<f64>>>,
    residual: Option<f64>,
}

fn decompose_spectrum(args: SpectrumArgs, tol: f64) -> Result<Outcome> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let spectrum = parse_spectrum(&text)?;
    let found = sumset_decompose(&spectrum, args.split.p, args.split.q, tol)?;
    let out = SpectrumOutput {
        result: if found.is_some() {
            "decomposable"
        } else {
            "none"
        },
        split: [args.split.p, args.split.q],
        tol,
        residual: found.as_ref().map(|d| d.residual),
        factors: found.map(|d: SpectrumDecomposition| d.factors),
    };
    emit(&out, args.output.as_deref())?;
    Ok(Outcome { failed: Vec::new() })
}

#[derive(Serialize)]
struct Certificate {
    /// `Tr₁ Hint`, a `q×q` matrix.
    trace_over_first: DenseJson,
    /// `Tr₂ Hint`, a `p×p` matrix.
    trace_over_second: DenseJson,
    residual: f64,
    threshold: f64,
}

#[derive(Serialize)]
struct LocalizeOutput {
    split: Vec<usize>,
    h1: DenseJson,
    h2: DenseJson,
    shift: f64,
    interaction: DenseJson,
    interaction_norm: f64,
    /// `‖Hint‖` recomputed from `‖W‖² − ‖Tr₂W‖²/q − ‖Tr₁W‖²/p + |Tr W|²/(pq)`.
    reference_interaction_norm: f64,
    certificate: Certificate,
    checks: Vec<Check>,
}

fn localize(args: LocalizeArgs) -> Result<Outcome> {
    let h = read_hamiltonian(&args.input)?;
    let f = match (&args.factorization, args.p, args.q) {
        (Some(path), _, _) => {
            let json: FactorizationJson =
                read_json(path).with_context(|| format!("reading {}", path.display()))?;
            json.to_factorization()?
        }
        (None, Some(p), Some(q)) => Factorization::canonical(TensorSplit::bipartite(p, q)?),
        _ => bail!("give either --factorization or both --p and --q"),
    };
    if f.dim() != h.dim() {
        bail!(
            "factorization has dimension {}, Hamiltonian has {}",
            f.dim(),
            h.dim()
        );
    }
    let d = nearest_local_decomposition(&h, &f)?;
    let (p, q) = d.split.as_bipartite()?;

    let w = f.operator_in_frame(&h)?;
    let dims = [p, q];
    let tr1 = partial_trace_matrix(&w, &dims, 1)?;
    let tr2 = partial_trace_matrix(&w, &dims, 0)?;
    let reference = (frobenius(&w).powi(2)
        - frobenius(&tr2).powi(2) / q as f64
        - frobenius(&tr1).powi(2) / p as f64
        + w.trace().norm_sqr() / (p * q) as f64)
        .max(0.0)
        .sqrt();

    let (c1, c2) = d.certificate();
    let threshold = TOL * d.scale;
    let residual = d.certificate_residual();
    let checks = vec![
        Check::at_most("partial_trace_certificate", residual, threshold),
        Check::at_most(
            "reconstruction",
            frobenius(&(d.reconstruct() - &w)),
            threshold.max(TOL),
        ),
        Check::at_most(
            "reference_norm",
            (d.interaction_norm() - reference).abs(),
            TOL * (1.0 + d.scale),
        ),
    ];
    let out = LocalizeOutput {
        split: vec![p, q],
        h1: DenseJson::from_matrix(d.h1.matrix()),
        h2: DenseJson::from_matrix(d.h2.matrix()),
        shift: d.shift,
        interaction: DenseJson::from_matrix(d.interaction.matrix()),
        interaction_norm: d.interaction_norm(),
        reference_interaction_norm: reference,
        certificate: Certificate {
            trace_over_first: DenseJson::from_matrix(&c1),
            trace_over_second: DenseJson::from_matrix(&c2),
            residual,
            threshold,
        },
        checks,
    };
    emit(&out, args.output.as_deref())?;
    Ok(Outcome::from_checks(&out.checks))
}

fn finish(report: &FactorizationReport, output: Option<&Path>) -> Result<Outcome> {
    emit(&report.to_json(), output)?;
    Ok(Outcome::from_checks(&report.checks))
}

fn nirvana(args: NirvanaArgs, tol: f64) -> Result<Outcome> {
    let h = read_hamiltonian(&args.input)?;
    let psi0 = read_state(args.psi0.as_deref(), h.dim())?;
    let times = grid_times(&args.grid)?;
    let report = if args.mode.static_mode {
        let mut report = static_nirvana_factorization(&h, args.split.p, args.split.q, tol)?;
        static_story(&mut report, &h, &psi0, &times)?;
        report
    } else {
        let split = split_for(&args.split, h.dim())?;
        let ham = PiecewiseHamiltonian::single(h, args.grid.t_start, args.grid.t_end)?;
        dynamic_nirvana_factorization(&ham, &psi0, &split, &times)?
    };
    finish(&report, args.output.as_deref())
}

fn optimize(args: OptimizeArgs) -> Result<Outcome> {
    let h = read_hamiltonian(&args.input)?;
    let psi0 = read_state(args.psi0.as_deref(), h.dim())?;
    let split = split_for(&args.split, h.dim())?;
    let objective: Objective = args.objective.parse()?;
    let options = OptimizerOptions {
        learning_rate: args.learning_rate,
        max_iters: args.max_iters,
        seed: args.seed,
        times: grid_times(&args.grid)?,
        ..OptimizerOptions::default()
    };
    let report = optimize_factorization(&h, &psi0, &split, objective, &options)?;
    finish(&report, args.output.as_deref())
}
