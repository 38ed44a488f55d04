use super::local::{nearest_local_decomposition, project_local};
use super::report::{Check, FactorizationData, FactorizationReport, ReportKind};
use super::sumset::{sumset_decompose, SpectrumDecomposition};
use crate::dynamics::{
    comoving_frame, components_in_frame, evolve_many, propagator, PiecewiseHamiltonian,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    eigh, frobenius, BasisTrajectory, CMatrix, Complex64, Factorization, Operator,
    OrthonormalBasis, State, TensorSplit,
};

/// Thresholds for the checks embedded in reports.
const PHASE_TOL: f64 = 1e-8;
const NIRVANA_TOL: f64 = 1e-9;

/// Builds the factorization whose subsystems are defined by labeling the
/// vectors of `basis` with multi-indices of `split`.
pub fn factorization_from_labeling(
    basis: OrthonormalBasis,
    split: TensorSplit,
    labels: Vec<Vec<usize>>,
) -> Result<Factorization> {
    Factorization::new(basis, split, labels)
}

fn check_split(dim: usize, p: usize, q: usize) -> Result<TensorSplit> {
    if TensorSplit::bipartitions_of(dim).is_empty() {
        return Err(Error::NoFactorPair(dim));
    }
    if p * q != dim || p < 2 || q < 2 {
        return Err(Error::InvalidSplit(format!(
            "{p}×{q} does not factor dimension {dim}"
        )));
    }
    TensorSplit::bipartite(p, q)
}

/// Gives eigenvector `n` (ascending eigenvalues) the lattice position whose
/// energy `a_i + b_j` has the same rank. Positions with equal energy are taken
/// in row-major order, so the assignment is the lexicographically smallest one.
fn assign_labels(
    split: &TensorSplit,
    decomposition: &SpectrumDecomposition,
) -> (Vec<Vec<usize>>, Vec<f64>) {
    let energies = decomposition.expand();
    let mut positions: Vec<usize> = (0..energies.len()).collect();
    positions.sort_by(|&x, &y| energies[x].total_cmp(&energies[y]));
    let labels = positions
        .iter()
        .map(|&flat| split.multi_index(flat))
        .collect();
    (labels, energies)
}

/// Eigenbasis factorization of a time-independent `h`.
///
/// When the spectrum is an additive sumset `{a_i + b_j}` within `tol`, the
/// eigenvectors are labeled so that `h = A⊗I + I⊗B` exactly and the report is
/// a static Nirvana factorization. Otherwise the eigenvectors are labeled in
/// ascending-eigenvalue order and the report describes Samsara branches: each
/// component still only rotates its phase, but `h` is not local.
pub fn static_nirvana_factorization(
    h: &Operator,
    p: usize,
    q: usize,
    tol: f64,
) -> Result<FactorizationReport> {
    let split = check_split(h.dim(), p, q)?;
    let eig = eigh(h)?;
    let decomposition = sumset_decompose(&eig.values, p, q, tol)?;
    let (kind, labels, energies) = match &decomposition {
        Some(d) => {
            let (labels, energies) = assign_labels(&split, d);
            (ReportKind::StaticNirvana, labels, energies)
        }
        None => (
            ReportKind::SamsaraBranches,
            split.lattice().collect(),
            eig.values.clone(),
        ),
    };
    let f = Factorization::new(eig.basis, split, labels)?;
    let local = nearest_local_decomposition(h, &f)?;
    let mut report = FactorizationReport::new(
        kind,
        FactorizationData::Static(f),
        "interaction-norm",
        local.interaction_norm(),
    );
    report.spectrum = Some(eig.values);
    report.sumset = decomposition;
    report.label_energies = Some(energies);
    match kind {
        ReportKind::StaticNirvana => {
            report.checks.push(Check::at_most(
                "interaction_norm",
                local.interaction_norm(),
                NIRVANA_TOL * h.frobenius_norm().max(1.0),
            ));
            report.note = Some(
                "spectrum is additive: the eigenbasis labeling makes the Hamiltonian a sum of \
                 subsystem terms with no interaction"
                    .into(),
            );
        }
        _ => {
            report.note = Some(
                "spectrum has no additive structure: eigenbasis labeled in ascending order; every \
                 branch is present from the start and only its phase speed depends on the \
                 interaction"
                    .into(),
            );
        }
    }
    Ok(report)
}

/// Evolves `psi0` under the time-independent `h` from `times[0]` and records the
/// story in the report's factorization: entropy, interaction action, and how
/// far each coordinate strays from a pure phase rotation `e^{−iE(t−t₀)}c(t₀)`.
pub fn static_story(
    report: &mut FactorizationReport,
    h: &Operator,
    psi0: &State,
    times: &[f64],
) -> Result<()> {
    let FactorizationData::Static(f) = &report.factorization else {
        return Err(Error::InvalidArgument(
            "static story needs a fixed factorization".into(),
        ));
    };
    let energies = report
        .label_energies
        .clone()
        .ok_or_else(|| Error::InvalidArgument("report carries no label energies".into()))?;
    let t0 = *times.first().ok_or(Error::EmptyInput("no sample times"))?;
    let states = times
        .iter()
        .map(|&t| propagator(h, t - t0)?.apply(psi0))
        .collect::<Result<Vec<_>>>()?;
    let frame = BasisTrajectory::constant(times.to_vec(), f.clone())?;
    let mut trace = components_in_frame(times, &states, &frame)?;

    let local = nearest_local_decomposition(h, f)?;
    let comps = trace.components().expect("frame attached").to_vec();
    let c0 = &comps[0];
    let mut phase_error = Vec::with_capacity(times.len());
    let mut modulus_drift = Vec::with_capacity(times.len());
    let mut action = Vec::with_capacity(times.len());
    for (&t, c) in times.iter().zip(&comps) {
        let dt = t - t0;
        let mut pe: f64 = 0.0;
        let mut md: f64 = 0.0;
        for (k, z) in c.iter().enumerate() {
            let expected = c0[k] * Complex64::from_polar(1.0, -energies[k] * dt);
            pe = pe.max((z - expected).norm());
            md = md.max((z.norm() - c0[k].norm()).abs());
        }
        phase_error.push(pe);
        modulus_drift.push(md);
        action.push((local.interaction.matrix() * c).norm());
    }
    trace.record_entropy(f.split())?;
    trace.set_diagnostic("phase_error", phase_error.clone())?;
    trace.set_diagnostic("modulus_drift", modulus_drift.clone())?;
    trace.set_diagnostic("interaction_action", action)?;

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    report
        .checks
        .retain(|c| c.name != "phase_rotation" && c.name != "constant_modulus");
    report.checks.push(Check::at_most(
        "phase_rotation",
        max(&phase_error),
        PHASE_TOL,
    ));
    report.checks.push(Check::at_most(
        "constant_modulus",
        max(&modulus_drift),
        PHASE_TOL,
    ));
    report.trace = Some(trace);
    Ok(())
}

/// Comoving factorization in which `psi0`'s whole evolution is absorbed by the
/// frame: `Ψ(t)` is the basis vector labeled `(0, 0, …)` at every sample.
///
/// Records per-sample entropy, component drift, and the apparent generator
/// `K_k = i(M_k − M_k†)/(2Δt)` where `M_k` maps frame coordinates at one
/// sample to the next. In a true Nirvana frame `M_k = I`, so nothing, not even
/// a phase, is left for the subsystems to do.
pub fn dynamic_nirvana_factorization(
    h: &PiecewiseHamiltonian,
    psi0: &State,
    split: &TensorSplit,
    times: &[f64],
) -> Result<FactorizationReport> {
    let frame = comoving_frame(h, psi0, times, split)?;
    let states = evolve_many(h, psi0, times)?;
    let mut trace = components_in_frame(times, &states, &frame)?;
    trace.record_entropy(split)?;
    let drift = trace.component_drift().expect("frame attached");
    let anchor: Vec<f64> = trace
        .components()
        .expect("frame attached")
        .iter()
        .map(|c| (c[0] - Complex64::from(1.0)).norm())
        .collect();

    let generators = apparent_generators(h, &frame);
    let generator_norm: Vec<f64> = generators.iter().map(frobenius).collect();
    let comps = trace.components().expect("frame attached");
    let apparent_action: Vec<f64> = match split.as_bipartite() {
        Ok((p, q)) => generators
            .iter()
            .zip(comps)
            .map(|(k, c)| (project_local(k, p, q).interaction * c).norm())
            .collect(),
        // no bipartite interaction to speak of; bound it by the full generator
        Err(_) => generators
            .iter()
            .zip(comps)
            .map(|(k, c)| (k * c).norm())
            .collect(),
    };

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let entropy = trace.diagnostic("entropy").map(max).unwrap_or(0.0);
    let checks = vec![
        Check::at_most("component_drift", max(&drift), NIRVANA_TOL),
        Check::at_most("anchored_state", max(&anchor), NIRVANA_TOL),
        Check::at_most("entropy", entropy, NIRVANA_TOL),
        Check::at_most(
            "apparent_interaction_action",
            max(&apparent_action),
            NIRVANA_TOL,
        ),
    ];
    trace.set_diagnostic("component_drift", drift.clone())?;
    trace.set_diagnostic("apparent_generator_norm", generator_norm)?;
    trace.set_diagnostic("apparent_interaction_action", apparent_action)?;

    let mut report = FactorizationReport::new(
        ReportKind::DynamicNirvana,
        FactorizationData::Trajectory(frame),
        "component-drift",
        max(&drift),
    );
    report.checks = checks;
    report.trace = Some(trace);
    report.note = Some(
        "comoving frame: the state is the fixed product vector (0, 0, …) at every sample".into(),
    );
    Ok(report)
}

/// `K_k = i(M_k − M_k†)/(2Δt)` with `M_k = F(t_{k+1})† U(t_{k+1}, t_k) F(t_k)`,
/// the coordinate transition between consecutive samples. The last sample
/// reuses the previous interval; a single sample gets the zero generator.
fn apparent_generators(h: &PiecewiseHamiltonian, frame: &BasisTrajectory) -> Vec<CMatrix> {
    let n = h.dim();
    let times = frame.times();
    let frames = frame.frames();
    if times.len() < 2 {
        return vec![CMatrix::zeros(n, n); times.len()];
    }
    let steps: Vec<CMatrix> = (0..times.len() - 1)
        .map(|k| {
            let u_next = h.evolution_operator(times[k + 1]);
            let u_now = h.evolution_operator(times[k]);
            let step = u_next.matrix() * u_now.matrix().adjoint();
            let m = frames[k + 1].lattice_frame().adjoint() * step * frames[k].lattice_frame();
            let dt = times[k + 1] - times[k];
            (&m - m.adjoint()) * Complex64::new(0.0, 0.5 / dt)
        })
        .collect();
    let last = steps.last().expect("at least one step").clone();
    steps.into_iter().chain(std::iter::once(last)).collect()
}
