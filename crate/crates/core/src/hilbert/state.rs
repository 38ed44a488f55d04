use super::{CVector, Complex64, TOL};
use crate::error::{Error, Result};

/// A unit vector in an `n`-dimensional complex space.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    amplitudes: CVector,
}

impl State {
    /// Builds a state, requiring unit norm within [`TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `v` to unit norm. Fails on the zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: v / Complex64::from(norm),
        })
    }

    /// Real amplitudes, convenient for hand-written states.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::from(x)).collect())
    }

    /// Standard basis vector `k` of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = CVector::zeros(dim);
        v[k] = Complex64::from(1.0);
        Self { amplitudes: v }
    }

    /// Used where the vector is unit by construction (unitary images, basis columns).
    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `|<self|other>|`, the phase-insensitive overlap.
    pub fn fidelity(&self, other: &State) -> Result<f64> {
        Ok(inner(self, other)?.norm())
    }

    /// Equality up to a global phase: `|<a|b>| >= 1 - tol`.
    pub fn equals_up_to_phase(&self, other: &State, tol: f64) -> bool {
        self.fidelity(other)
            .map(|f| f >= 1.0 - tol)
            .unwrap_or(false)
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner(a: &State, b: &State) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(a.amplitudes.dotc(&b.amplitudes))
}

/// `min_φ ‖a − e^{iφ} b‖`: distance between two vectors after removing the
/// relative global phase.
pub fn phase_aligned_distance(a: &CVector, b: &CVector) -> f64 {
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::from(1.0)
    };
    (a - b * phase).norm()
}

/// Kronecker product of states, last factor fastest-varying.
pub fn tensor(states: &[State]) -> Result<State> {
    let (first, rest) = states
        .split_first()
        .ok_or(Error::EmptyInput("tensor of no states"))?;
    let v = rest.iter().fold(first.amplitudes.clone(), |acc, s| {
        acc.kronecker(&s.amplitudes)
    });
    Ok(State { amplitudes: v })
}
