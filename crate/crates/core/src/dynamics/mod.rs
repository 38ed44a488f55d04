//! Time evolution under time-independent and piecewise-constant Hamiltonians.
//!
//! Propagators are built from the eigendecomposition, `exp(−iHt) = V e^{−iΛt} V†`,
//! so unitarity holds to round-off and evolution is exact at every sample.

mod frame;
mod trace;

pub use frame::{comoving_frame, components_in_frame};
pub use trace::{ComplexRows, EvolutionTrace, TraceJson};

use crate::error::{Error, Result};
use crate::hilbert::eigh_matrix;
use crate::hilbert::{CMatrix, CVector, Complex64, Operator, State};

/// `U = exp(−i·H·dt)`.
pub fn propagator(h: &Operator, dt: f64) -> Result<Operator> {
    let spectral = Spectral::new(h)?;
    Operator::unitary(spectral.exp(dt))
}

/// Cached eigendecomposition of one hermitian generator.
#[derive(Clone, Debug)]
struct Spectral {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl Spectral {
    fn new(h: &Operator) -> Result<Self> {
        if !h.is_hermitian() {
            let dev = h.hermiticity_deviation();
            if dev > crate::hilbert::TOL * (1.0 + h.frobenius_norm()) {
                return Err(Error::NotHermitian(dev));
            }
        }
        let (values, vectors) = eigh_matrix(h.matrix());
        Ok(Self { values, vectors })
    }

    fn exp(&self, dt: f64) -> CMatrix {
        let phases = CVector::from_iterator(
            self.values.len(),
            self.values
                .iter()
                .map(|&e| Complex64::from_polar(1.0, -e * dt)),
        );
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * self.vectors.adjoint()
    }
}

/// One interval `[start, end)` on which the Hamiltonian is constant.
#[derive(Clone, Debug)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub hamiltonian: Operator,
}

/// Hamiltonian that is constant on contiguous segments and zero outside them.
#[derive(Clone, Debug)]
pub struct PiecewiseHamiltonian {
    dim: usize,
    segments: Vec<Segment>,
    spectra: Vec<Spectral>,
}

impl PiecewiseHamiltonian {
    pub fn new(dim: usize, segments: Vec<Segment>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        for s in &segments {
            if !(s.start.is_finite() && s.end.is_finite() && s.start < s.end) {
                return Err(Error::InvalidSegments(format!(
                    "segment [{}, {}] is empty or non-finite",
                    s.start, s.end
                )));
            }
            if s.hamiltonian.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.hamiltonian.dim(),
                });
            }
        }
        for w in segments.windows(2) {
            if (w[1].start - w[0].end).abs() > 1e-12 * (1.0 + w[0].end.abs()) {
                return Err(Error::InvalidSegments(format!(
                    "segments [{}, {}] and [{}, {}] are not contiguous",
                    w[0].start, w[0].end, w[1].start, w[1].end
                )));
            }
        }
        let spectra = segments
            .iter()
            .map(|s| Spectral::new(&s.hamiltonian))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim,
            segments,
            spectra,
        })
    }

    /// `H` switched on over `[start, end)`.
    pub fn single(h: Operator, start: f64, end: f64) -> Result<Self> {
        let dim = h.dim();
        Self::new(
            dim,
            vec![Segment {
                start,
                end,
                hamiltonian: h,
            }],
        )
    }

    /// No dynamics at all.
    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Time at which initial states are specified; states are frozen before it.
    pub fn start(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.start)
    }

    /// The generator active at `t`; zero outside all segments.
    pub fn hamiltonian_at(&self, t: f64) -> Operator {
        self.segments
            .iter()
            .find(|s| s.start <= t && t < s.end)
            .map(|s| s.hamiltonian.clone())
            .unwrap_or_else(|| Operator::zeros(self.dim))
    }

    /// Index of the segment that contains `t`, if any.
    pub fn segment_index(&self, t: f64) -> Option<usize> {
        self.segments.iter().position(|s| s.start <= t && t < s.end)
    }

    /// `U(t, t₀)` from the initial time to `t`.
    pub fn evolution_operator(&self, t: f64) -> Operator {
        let mut u = CMatrix::identity(self.dim, self.dim);
        for (seg, spectral) in self.segments.iter().zip(&self.spectra) {
            let dt = t.min(seg.end) - seg.start;
            if dt <= 0.0 {
                break;
            }
            u = spectral.exp(dt) * u;
        }
        Operator::from_parts(u, false, true)
    }
}

/// `ψ(t) = U(t, t₀)·ψ₀`.
pub fn evolve(h: &PiecewiseHamiltonian, psi0: &State, t: f64) -> Result<State> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    h.evolution_operator(t).apply(psi0)
}

/// Evolves to every sample of `times` (any order).
pub fn evolve_many(h: &PiecewiseHamiltonian, psi0: &State, times: &[f64]) -> Result<Vec<State>> {
    times.iter().map(|&t| evolve(h, psi0, t)).collect()
}

/// `n` evenly spaced samples on `[start, end]`, both ends included.
pub fn linspace(start: f64, end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(start < end) {
        return Err(Error::InvalidTimes(format!(
            "need at least 2 samples on a non-empty interval, got {n} on [{start}, {end}]"
        )));
    }
    let step = (end - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                end
            } else {
                start + step * k as f64
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{c, CMatrix};

    fn sample_h() -> Operator {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(0.3, -0.2),
                c(0.0, 0.5),
                c(0.3, 0.2),
                c(-0.4, 0.0),
                c(0.7, 0.0),
                c(0.0, -0.5),
                c(0.7, 0.0),
                c(0.2, 0.0),
            ],
        );
        Operator::hermitian(m).unwrap()
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let u = propagator(&sample_h(), 0.0).unwrap();
        assert!((u.matrix() - CMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn propagator_of_diagonal_is_phase_rotation() {
        let energies = [0.5, -1.25, 2.0];
        let t = 0.8;
        let u = propagator(&Operator::diagonal(&energies), t).unwrap();
        for (k, e) in energies.iter().enumerate() {
            assert!((u.matrix()[(k, k)] - Complex64::from_polar(1.0, -e * t)).norm() < 1e-14);
        }
        assert!(u.is_unitary());
    }

    #[test]
    fn propagator_rejects_non_hermitian() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(propagator(&Operator::new(m).unwrap(), 1.0).is_err());
    }

    #[test]
    fn zero_hamiltonian_freezes_state() {
        let h = PiecewiseHamiltonian::zero(3).unwrap();
        let psi = State::from_real(&[0.6, 0.0, 0.8]).unwrap();
        assert_eq!(evolve(&h, &psi, 10.0).unwrap(), psi);
    }

    #[test]
    fn state_is_frozen_outside_segments() {
        let h = PiecewiseHamiltonian::single(sample_h(), 1.0, 2.0).unwrap();
        let psi = State::from_real(&[0.6, 0.0, 0.8]).unwrap();
        assert_eq!(evolve(&h, &psi, 0.5).unwrap(), psi);
        let at_end = evolve(&h, &psi, 2.0).unwrap();
        let later = evolve(&h, &psi, 7.0).unwrap();
        assert!((at_end.amplitudes() - later.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn segments_must_be_contiguous_and_sized() {
        let seg = |a, b| Segment {
            start: a,
            end: b,
            hamiltonian: sample_h(),
        };
        assert!(PiecewiseHamiltonian::new(3, vec![seg(0.0, 1.0), seg(1.5, 2.0)]).is_err());
        assert!(PiecewiseHamiltonian::new(3, vec![seg(1.0, 1.0)]).is_err());
        assert!(PiecewiseHamiltonian::new(4, vec![seg(0.0, 1.0)]).is_err());
        assert!(PiecewiseHamiltonian::new(3, vec![seg(0.0, 1.0), seg(1.0, 2.0)]).is_ok());
    }

    #[test]
    fn evolve_rejects_dim_mismatch() {
        let h = PiecewiseHamiltonian::zero(3).unwrap();
        assert!(evolve(&h, &State::basis(2, 0), 1.0).is_err());
    }

    #[test]
    fn linspace_includes_endpoints() {
        let t = linspace(0.0, 1.0, 5).unwrap();
        assert_eq!(t, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(linspace(0.0, 1.0, 1).is_err());
        assert!(linspace(1.0, 1.0, 3).is_err());
    }
}
