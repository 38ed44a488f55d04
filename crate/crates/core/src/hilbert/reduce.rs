use nalgebra::SVD;

use super::operator::eigh_matrix;
use super::{CMatrix, CVector, Complex64, Operator, State, TensorSplit, SCHMIDT_FLOOR};
use crate::error::{Error, Result};

/// `|ψ⟩⟨ψ|`.
pub fn density(psi: &State) -> Operator {
    let v = psi.amplitudes();
    Operator::from_parts(v * v.adjoint(), true, false)
}

/// Reduced operator on factor `keep`, tracing out every other factor.
pub fn partial_trace(rho: &Operator, split: &TensorSplit, keep: usize) -> Result<Operator> {
    split.check_dim(rho.dim())?;
    let m = partial_trace_matrix(rho.matrix(), split.dims(), keep)?;
    Ok(Operator::from_parts(m, rho.is_hermitian(), false))
}

/// Raw-matrix form of [`partial_trace`].
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: usize) -> Result<CMatrix> {
    if keep >= dims.len() {
        return Err(Error::InvalidFactor {
            index: keep,
            factors: dims.len(),
        });
    }
    let d_keep = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let mut out = CMatrix::zeros(d_keep, d_keep);
    // flat = (o * d_keep + k) * inner + r
    for o in 0..outer {
        for r in 0..inner {
            for a in 0..d_keep {
                let i = (o * d_keep + a) * inner + r;
                for b in 0..d_keep {
                    let j = (o * d_keep + b) * inner + r;
                    out[(a, b)] += m[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

/// Schmidt data of a bipartite pure state: `ψ = Σ_k s_k a_k ⊗ b_k`.
#[derive(Clone, Debug)]
pub struct Schmidt {
    /// Descending, nonnegative; entries below the clamp floor are exactly zero.
    pub coefficients: Vec<f64>,
    pub left: Vec<State>,
    pub right: Vec<State>,
}

impl Schmidt {
    /// `Σ_k s_k a_k ⊗ b_k`.
    pub fn reconstruct(&self) -> CVector {
        let dim = self.left[0].dim() * self.right[0].dim();
        self.coefficients
            .iter()
            .zip(self.left.iter().zip(&self.right))
            .fold(CVector::zeros(dim), |acc, (&s, (a, b))| {
                acc + a.amplitudes().kronecker(b.amplitudes()) * Complex64::from(s)
            })
    }

    /// Squared coefficients, the spectrum of either reduced state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_probabilities(&self.probabilities())
    }
}

pub fn schmidt(psi: &State, split: &TensorSplit) -> Result<Schmidt> {
    let (p, q) = split.as_bipartite()?;
    split.check_dim(psi.dim())?;
    let amps = psi.amplitudes();
    let m = CMatrix::from_fn(p, q, |i, j| amps[i * q + j]);
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let r = p.min(q);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut coefficients = Vec::with_capacity(r);
    let mut left = Vec::with_capacity(r);
    let mut right = Vec::with_capacity(r);
    for k in order {
        let s = svd.singular_values[k];
        coefficients.push(if s < SCHMIDT_FLOOR { 0.0 } else { s });
        left.push(State::from_vector_unchecked(u.column(k).into_owned()));
        right.push(State::from_vector_unchecked(v_t.row(k).transpose()));
    }
    Ok(Schmidt {
        coefficients,
        left,
        right,
    })
}

/// Von Neumann entropy (nats) of the reduced state on either side of a bipartite split.
pub fn entanglement_entropy(psi: &State, split: &TensorSplit) -> Result<f64> {
    Ok(schmidt(psi, split)?.entropy())
}

/// `−Σ λ ln λ` with `0·ln 0 = 0`; tiny negative round-off is ignored.
pub fn entropy_of_probabilities(probabilities: &[f64]) -> f64 {
    let s: f64 = probabilities
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(0.0)
}

/// Entropy (nats) from the eigenvalues of a density operator.
pub fn von_neumann_entropy(rho: &Operator) -> f64 {
    entropy_of_probabilities(&eigh_matrix(rho.matrix()).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{tensor, CVector};
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn split32() -> TensorSplit {
        TensorSplit::new(vec![3, 2]).unwrap()
    }

    /// `(|+⟩⊗|↑⟩ + |−⟩⊗|↓⟩)/√2` in the pointer ⊗ spin layout.
    fn branched() -> State {
        State::from_real(&[0.0, 0.0, FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let a = State::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let b = State::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let psi = tensor(&[a.clone(), b]).unwrap();
        let red = partial_trace(&density(&psi), &split32(), 0).unwrap();
        assert!((red.matrix() - density(&a).matrix()).norm() < 1e-15);
    }

    #[test]
    fn branched_state_reduces_to_half_half_on_pointer() {
        // expanding |Ψ⟩⟨Ψ| by hand: the pointer sees |+⟩ and |−⟩ with weight 1/2 each, no coherence
        let red = partial_trace(&density(&branched()), &split32(), 0).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::from(0.0),
            Complex64::from(0.5),
            Complex64::from(0.5),
        ]));
        assert!((red.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn maximally_mixed_stays_maximally_mixed() {
        let rho = Operator::new(CMatrix::identity(6, 6) / Complex64::from(6.0)).unwrap();
        let a = partial_trace(&rho, &split32(), 0).unwrap();
        let b = partial_trace(&rho, &split32(), 1).unwrap();
        assert!((a.matrix() - CMatrix::identity(3, 3) / Complex64::from(3.0)).norm() < 1e-15);
        assert!((b.matrix() - CMatrix::identity(2, 2) / Complex64::from(2.0)).norm() < 1e-15);
    }

    #[test]
    fn middle_factor_of_three() {
        let a = State::basis(2, 1);
        let b = State::from_real(&[0.6, 0.8, 0.0]).unwrap();
        let c = State::basis(2, 0);
        let psi = tensor(&[a, b.clone(), c]).unwrap();
        let split = TensorSplit::new(vec![2, 3, 2]).unwrap();
        let red = partial_trace(&density(&psi), &split, 1).unwrap();
        assert!((red.matrix() - density(&b).matrix()).norm() < 1e-15);
    }

    #[test]
    fn invalid_keep_index() {
        let rho = density(&State::basis(6, 0));
        assert!(matches!(
            partial_trace(&rho, &split32(), 2),
            Err(Error::InvalidFactor {
                index: 2,
                factors: 2
            })
        ));
    }

    #[test]
    fn schmidt_of_product_state() {
        let psi = tensor(&[State::basis(3, 1), State::basis(2, 0)]).unwrap();
        let s = schmidt(&psi, &split32()).unwrap();
        assert_eq!(s.coefficients, vec![1.0, 0.0]);
        assert_eq!(entanglement_entropy(&psi, &split32()).unwrap(), 0.0);
    }

    #[test]
    fn schmidt_of_branched_state() {
        let s = schmidt(&branched(), &split32()).unwrap();
        for c in &s.coefficients {
            assert!((c - FRAC_1_SQRT_2).abs() < 1e-12);
        }
        assert!((s.entropy() - LN_2).abs() < 1e-12);
        assert!((s.reconstruct() - branched().amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn bell_pair_embedded_in_six_dims() {
        let psi = State::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2, 0.0, 0.0]).unwrap();
        assert!((entanglement_entropy(&psi, &split32()).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn schmidt_needs_bipartite_split() {
        let split = TensorSplit::new(vec![2, 2, 2]).unwrap();
        assert!(matches!(
            schmidt(&State::basis(8, 0), &split),
            Err(Error::NotBipartite(3))
        ));
    }

    #[test]
    fn reduced_entropy_matches_schmidt() {
        let psi = branched();
        let rho = partial_trace(&density(&psi), &split32(), 1).unwrap();
        assert!((von_neumann_entropy(&rho) - LN_2).abs() < 1e-12);
    }
}
