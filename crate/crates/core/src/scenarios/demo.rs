use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::measurement::{
    build_measurement_model, primed_factorization, run_superposition, MeasurementModel,
};
use super::observer::{build_observer_model, run_full, ObserverModel};
use super::{POINTER_MINUS, POINTER_PLUS, SPIN_DOWN, SPIN_UP};
use crate::dynamics::{ComplexRows, EvolutionTrace, TraceJson};
use crate::error::Result;
use crate::factorize::{Check, FactorizationReport, ReportJson};
use crate::hilbert::{phase_aligned_distance, schmidt, CVector, Complex64, Operator, State};
use crate::io::{to_json_string, DenseJson};

const OBSERVER_NOTE: &str = "observer dimension (3) and the read-off generator are modelling \
    choices: the read-off mirrors the measurement generator and runs for one window right \
    after it";

/// Everything the measurement walkthrough produces, plus its pass/fail checks.
#[derive(Clone, Debug)]
pub struct MeasurementDemo {
    pub model: MeasurementModel,
    pub observer: ObserverModel,
    pub unprimed: EvolutionTrace,
    pub primed: FactorizationReport,
    pub full: EvolutionTrace,
    pub schmidt_unprimed: Vec<f64>,
    pub schmidt_primed: Vec<f64>,
    pub pointer_observable: Operator,
    pub observer_state: Operator,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyPair {
    pub unprimed: f64,
    pub primed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoJson {
    pub t_before: f64,
    pub t_after: f64,
    pub read_off_end: f64,
    pub omega: f64,
    pub samples: usize,
    pub final_components: FinalComponents,
    pub schmidt: SchmidtJson,
    pub entropy_after: EntropyPair,
    pub pointer_observable: DenseJson,
    pub observer_state_after: DenseJson,
    pub unprimed: TraceJson,
    pub primed: ReportJson,
    pub observer: TraceJson,
    pub checks: Vec<Check>,
    pub all_checks_pass: bool,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalComponents {
    pub unprimed: ComplexRows,
    pub primed: ComplexRows,
    pub observer_alpha_beta: ComplexRows,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchmidtJson {
    pub unprimed: Vec<f64>,
    pub primed: Vec<f64>,
}

fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::from(x)))
}

fn rows(v: &CVector) -> ComplexRows {
    ComplexRows {
        re: vec![v.iter().map(|z| z.re).collect()],
        im: vec![v.iter().map(|z| z.im).collect()],
    }
}

/// Builds both models, replays the trajectory in all three descriptions and
/// checks every claim the walkthrough makes.
pub fn measurement_demo(t_before: f64, t_after: f64, samples: usize) -> Result<MeasurementDemo> {
    let model = build_measurement_model(t_before, t_after)?;
    let unprimed = run_superposition(&model, samples)?;
    let primed = primed_factorization(&model, samples)?;
    let observer = build_observer_model(&model)?;
    let full = run_full(&observer, samples)?;

    let r = FRAC_1_SQRT_2;
    let mut checks = model.verify();

    let last = unprimed.last_components().expect("frame attached");
    checks.push(Check::at_most(
        "unprimed_after",
        phase_aligned_distance(last, &real_vector(&[0.0, 0.0, r, 0.0, 0.0, r])),
        1e-10,
    ));
    checks.extend(primed.checks.iter().cloned());

    let after = unprimed.states().last().expect("non-empty");
    let s_unprimed = schmidt(after, model.split())?;
    let primed_frame = primed.factorization.initial();
    let s_primed = schmidt(&primed_frame.state_in_frame(after)?, model.split())?;
    let pad = |c: &[f64]| {
        let mut v = c.to_vec();
        v.resize(2, 0.0);
        v
    };
    let schmidt_unprimed = pad(&s_unprimed.coefficients);
    let schmidt_primed = pad(&s_primed.coefficients);
    let dist2 = |a: &[f64], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    checks.push(Check::at_most(
        "schmidt_unprimed",
        dist2(&schmidt_unprimed, [r, r]),
        1e-10,
    ));
    checks.push(Check::at_most(
        "schmidt_primed",
        dist2(&schmidt_primed, [1.0, 0.0]),
        1e-10,
    ));
    checks.push(Check::at_most(
        "entropy_unprimed_after",
        (s_unprimed.entropy() - LN_2).abs(),
        1e-9,
    ));
    checks.push(Check::at_most(
        "entropy_primed_after",
        s_primed.entropy().abs(),
        1e-9,
    ));

    // both descriptions reconstruct the same vector
    let rebuilt = primed_frame.lattice_frame()
        * primed
            .trace
            .as_ref()
            .expect("trace")
            .last_components()
            .expect("frame");
    checks.push(Check::at_most(
        "same_state",
        (rebuilt - after.amplitudes()).norm(),
        1e-10,
    ));

    let pointer_observable = model.pointer_observable()?;
    checks.push(Check::at_most(
        "pointer_observable_sigma_z",
        (pointer_observable.matrix() - Operator::diagonal(&[1.0, -1.0]).matrix()).norm(),
        1e-10,
    ));
    for (pointer, spin, name) in [
        (POINTER_PLUS, SPIN_UP, "branch_plus_is_up"),
        (POINTER_MINUS, SPIN_DOWN, "branch_minus_is_down"),
    ] {
        let branch = model.branch_spin_state(after, pointer);
        let err = branch.map_or(f64::INFINITY, |b| {
            phase_aligned_distance(b.amplitudes(), State::basis(2, spin).amplitudes())
        });
        checks.push(Check::at_most(name, err, 1e-10));
    }

    let overlap = crate::hilbert::inner(&observer.phi_before, &observer.phi_after)?.norm();
    checks.push(Check::at_most("observer_orthogonality", overlap, 1e-10));
    let mut ab_before = vec![0.0; 18];
    ab_before[0] = r;
    ab_before[1] = r;
    let mut ab_after = ab_before.clone();
    ab_after[1] = -r;
    checks.push(Check::at_most(
        "observer_alpha_beta_before",
        phase_aligned_distance(
            full.first_components().expect("frame"),
            &real_vector(&ab_before),
        ),
        1e-9,
    ));
    checks.push(Check::at_most(
        "observer_alpha_beta_after",
        phase_aligned_distance(
            full.last_components().expect("frame"),
            &real_vector(&ab_after),
        ),
        1e-9,
    ));
    let observer_state = observer.observer_state_after()?;
    checks.push(Check::at_most(
        "observer_reduced_state",
        (observer_state.matrix() - Operator::diagonal(&[0.0, 0.5, 0.5]).matrix()).norm(),
        1e-10,
    ));
    let primed_comps = primed
        .trace
        .as_ref()
        .expect("trace")
        .components()
        .expect("frame");
    let read_off = observer.read_off_components(samples)?;
    let recursion = read_off
        .iter()
        .zip(primed_comps)
        .map(|(a, b)| (a[0] - b[0]).norm().max((a[1] - b[1]).norm()))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("recursion", recursion, 1e-9));

    Ok(MeasurementDemo {
        model,
        observer,
        unprimed,
        primed,
        full,
        schmidt_unprimed,
        schmidt_primed,
        pointer_observable,
        observer_state,
        checks,
    })
}

impl MeasurementDemo {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn final_entropy(trace: &EvolutionTrace) -> f64 {
        trace
            .diagnostic("entropy")
            .and_then(|e| e.last().copied())
            .unwrap_or(f64::NAN)
    }

    pub fn to_json(&self) -> DemoJson {
        let primed_trace = self.primed.trace.as_ref().expect("trace");
        DemoJson {
            t_before: self.model.t_before,
            t_after: self.model.t_after,
            read_off_end: self.observer.read_off_end,
            omega: self.model.omega,
            samples: self.unprimed.len(),
            final_components: FinalComponents {
                unprimed: rows(self.unprimed.last_components().expect("frame")),
                primed: rows(primed_trace.last_components().expect("frame")),
                observer_alpha_beta: rows(self.full.last_components().expect("frame")),
            },
            schmidt: SchmidtJson {
                unprimed: self.schmidt_unprimed.clone(),
                primed: self.schmidt_primed.clone(),
            },
            entropy_after: EntropyPair {
                unprimed: Self::final_entropy(&self.unprimed),
                primed: Self::final_entropy(primed_trace),
            },
            pointer_observable: DenseJson::from_matrix(self.pointer_observable.matrix()),
            observer_state_after: DenseJson::from_matrix(self.observer_state.matrix()),
            unprimed: self.unprimed.to_json(),
            primed: self.primed.to_json(),
            observer: self.full.to_json(),
            checks: self.checks.clone(),
            all_checks_pass: self.all_checks_pass(),
            note: OBSERVER_NOTE.into(),
        }
    }

    /// Writes `report.json`, `unprimed.csv`, `primed.csv` and `observer.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), to_json_string(&self.to_json())?)?;
        fs::write(dir.join("unprimed.csv"), self.unprimed.to_csv_string()?)?;
        let primed = self.primed.trace.as_ref().expect("trace");
        fs::write(dir.join("primed.csv"), primed.to_csv_string()?)?;
        fs::write(dir.join("observer.csv"), self.full.to_csv_string()?)?;
        Ok(())
    }
}
