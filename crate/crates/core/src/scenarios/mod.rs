//! A pointer/spin measurement told two ways, and an observer who reads it off.
//!
//! Layout: the apparatus `M` has pointer states `|0⟩, |+⟩, |−⟩`, the measured
//! spin `S1` has `|↑⟩, |↓⟩`, and `S2 = M ⊗ S1` is six-dimensional with basis
//! `e1 = |0↑⟩, e2 = |0↓⟩, e3 = |+↑⟩, e4 = |+↓⟩, e5 = |−↑⟩, e6 = |−↓⟩`.

mod demo;
mod measurement;
mod observer;

pub use demo::{measurement_demo, MeasurementDemo};
pub use measurement::{
    build_measurement_model, primed_basis, primed_factorization, run_superposition, s2_vector,
    MeasurementModel, POINTER_MINUS, POINTER_PLUS, POINTER_READY, SPIN_DOWN, SPIN_UP,
};
pub use observer::{
    build_observer_model, run_full, ObserverModel, OBSERVER_READY, OBSERVER_SAW_MINUS,
    OBSERVER_SAW_PLUS,
};

use crate::hilbert::{CMatrix, Complex64};

/// `ω·i(|b⟩⟨a| − |a⟩⟨b|)`: generates the rotation `|a⟩ → cos(ωt)|a⟩ + sin(ωt)|b⟩`,
/// which lands on `|b⟩` with phase exactly +1 at `ωt = π/2`.
pub(crate) fn rotation_generator(dim: usize, pairs: &[(usize, usize)], omega: f64) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for &(a, b) in pairs {
        m[(b, a)] += Complex64::new(0.0, omega);
        m[(a, b)] += Complex64::new(0.0, -omega);
    }
    m
}
