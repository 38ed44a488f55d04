use std::f64::consts::FRAC_1_SQRT_2;

use super::measurement::{MeasurementModel, POINTER_MINUS, POINTER_PLUS};
use super::rotation_generator;
use crate::dynamics::{
    components_in_frame, evolve, evolve_many, linspace, EvolutionTrace, PiecewiseHamiltonian,
    Segment,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    entanglement_entropy, gram_schmidt_complete, inner, kron, tensor, BasisTrajectory,
    Factorization, Operator, State, TensorSplit,
};

pub const OBSERVER_READY: usize = 0;
pub const OBSERVER_SAW_PLUS: usize = 1;
pub const OBSERVER_SAW_MINUS: usize = 2;

/// `S3 = O ⊗ S2`: a three-state observer that reads the pointer during
/// `[t_after, t_after + Δt)`, right after the measurement.
///
/// The observer's dimension and read-off generator are a modelling choice; the
/// read-off mirrors the measurement generator one level up.
#[derive(Clone, Debug)]
pub struct ObserverModel {
    pub measurement: MeasurementModel,
    /// `[3, 6]`: observer ⊗ S2.
    pub split: TensorSplit,
    pub hamiltonian: PiecewiseHamiltonian,
    pub read_off_end: f64,
    /// `|ready⟩ ⊗ Ψ_before`.
    pub phi_before: State,
    /// `U(read_off_end, t_before) Φ_before`.
    pub phi_after: State,
    pub alpha: State,
    pub beta: State,
}

fn s3_index(observer: usize, s2: usize) -> usize {
    6 * observer + s2
}

pub fn build_observer_model(model: &MeasurementModel) -> Result<ObserverModel> {
    let dt = model.window();
    let read_off_end = model.t_after + dt;
    let measurement = kron(&[Operator::identity(3), model.generator.clone()])?;
    let mut pairs = Vec::new();
    for (pointer, saw) in [
        (POINTER_PLUS, OBSERVER_SAW_PLUS),
        (POINTER_MINUS, OBSERVER_SAW_MINUS),
    ] {
        for spin in 0..2 {
            let s2 = 2 * pointer + spin;
            pairs.push((s3_index(OBSERVER_READY, s2), s3_index(saw, s2)));
        }
    }
    let read_off = Operator::hermitian(rotation_generator(18, &pairs, model.omega))?;
    let hamiltonian = PiecewiseHamiltonian::new(
        18,
        vec![
            Segment {
                start: model.t_before,
                end: model.t_after,
                hamiltonian: measurement,
            },
            Segment {
                start: model.t_after,
                end: read_off_end,
                hamiltonian: read_off,
            },
        ],
    )?;

    let phi_before = tensor(&[State::basis(3, OBSERVER_READY), model.before_state()])?;
    let phi_after = evolve(&hamiltonian, &phi_before, read_off_end)?;
    let overlap = inner(&phi_before, &phi_after)?.norm();
    if overlap > 1e-10 {
        return Err(Error::Invariant(format!(
            "observer before/after states overlap by {overlap:e}"
        )));
    }
    let r = num_complex::Complex64::from(FRAC_1_SQRT_2);
    let alpha = State::from_vector((phi_before.amplitudes() + phi_after.amplitudes()) * r)?;
    let beta = State::from_vector((phi_before.amplitudes() - phi_after.amplitudes()) * r)?;
    Ok(ObserverModel {
        measurement: model.clone(),
        split: TensorSplit::new(vec![3, 6])?,
        hamiltonian,
        read_off_end,
        phi_before,
        phi_after,
        alpha,
        beta,
    })
}

impl ObserverModel {
    /// `(α, β, …)` completed by Gram–Schmidt; `α` is `(0,0)` and `β` is `(0,1)`
    /// on the observer ⊗ S2 lattice.
    pub fn alpha_beta_factorization(&self) -> Result<Factorization> {
        let basis = gram_schmidt_complete(&[self.alpha.clone(), self.beta.clone()])?;
        Factorization::row_major(basis, self.split.clone())
    }

    pub fn time_grid(&self, samples: usize) -> Result<Vec<f64>> {
        linspace(self.measurement.t_before, self.read_off_end, samples)
    }

    /// Read-off window alone, written in the two-vector basis
    /// `(|ready⟩⊗Ψ_after ± Φ_after)/√2`. The sequence matches the S2 story in
    /// the primed basis sample by sample.
    pub fn read_off_components(&self, samples: usize) -> Result<Vec<[num_complex::Complex64; 2]>> {
        let start = evolve(
            &self.hamiltonian,
            &self.phi_before,
            self.measurement.t_after,
        )?;
        let r = num_complex::Complex64::from(FRAC_1_SQRT_2);
        let a = (start.amplitudes() + self.phi_after.amplitudes()) * r;
        let b = (start.amplitudes() - self.phi_after.amplitudes()) * r;
        let times = linspace(self.measurement.t_after, self.read_off_end, samples)?;
        Ok(evolve_many(&self.hamiltonian, &self.phi_before, &times)?
            .iter()
            .map(|s| [a.dotc(s.amplitudes()), b.dotc(s.amplitudes())])
            .collect())
    }

    /// Observer's reduced state at the end of the read-off.
    pub fn observer_state_after(&self) -> Result<Operator> {
        crate::hilbert::partial_trace(&crate::hilbert::density(&self.phi_after), &self.split, 0)
    }
}

/// Measurement followed by read-off, with coordinates in the `(α, β, …)`
/// basis. Diagnostics: `entropy` in that basis and `observer_entropy` across
/// the plain observer ⊗ S2 split.
pub fn run_full(observer: &ObserverModel, samples: usize) -> Result<EvolutionTrace> {
    let times = observer.time_grid(samples)?;
    let states = evolve_many(&observer.hamiltonian, &observer.phi_before, &times)?;
    let frame = BasisTrajectory::constant(times.clone(), observer.alpha_beta_factorization()?)?;
    let mut trace = components_in_frame(&times, &states, &frame)?;
    trace.record_entropy(&observer.split)?;
    let plain = states
        .iter()
        .map(|s| entanglement_entropy(s, &observer.split))
        .collect::<Result<Vec<_>>>()?;
    trace.set_diagnostic("observer_entropy", plain)?;
    Ok(trace)
}

/// `|o⟩ ⊗ v` for an S2 vector.
#[cfg(test)]
fn with_observer(o: usize, v: &crate::hilbert::CVector) -> crate::hilbert::CVector {
    let mut out = crate::hilbert::CVector::zeros(18);
    out.rows_mut(6 * o, 6).copy_from(v);
    out
}
