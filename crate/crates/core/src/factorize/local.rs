use crate::error::{Error, Result};
use crate::hilbert::{
    frobenius, kron, partial_trace_matrix, CMatrix, Complex64, Factorization, Operator, State,
    TensorSplit, TOL,
};

/// `H = H1⊗I + I⊗H2 − c·I + Hint`, all expressed in a factorization's basis,
/// with `Hint` the Hilbert–Schmidt-orthogonal remainder after projecting onto
/// `span{A⊗I, I⊗B}`.
#[derive(Clone, Debug)]
pub struct LocalDecomposition {
    pub h1: Operator,
    pub h2: Operator,
    /// `Tr(H)/(pq)`, subtracted once so that it is not double counted.
    pub shift: f64,
    pub interaction: Operator,
    pub split: TensorSplit,
    /// `‖H‖_F`, the natural scale for the certificate tolerances.
    pub scale: f64,
}

impl LocalDecomposition {
    pub fn interaction_norm(&self) -> f64 {
        self.interaction.frobenius_norm()
    }

    /// `H1⊗I + I⊗H2 − c·I + Hint` in the factorization's basis.
    pub fn reconstruct(&self) -> CMatrix {
        let (p, q) = self
            .split
            .as_bipartite()
            .expect("bipartite by construction");
        let local = kron(&[self.h1.clone(), Operator::identity(q)])
            .and_then(|a| a.add(&kron(&[Operator::identity(p), self.h2.clone()])?))
            .expect("dimensions agree by construction");
        local.matrix() - CMatrix::identity(p * q, p * q) * Complex64::from(self.shift)
            + self.interaction.matrix()
    }

    /// `(Tr₁ Hint, Tr₂ Hint)`; both vanish for the orthogonal projection.
    pub fn certificate(&self) -> (CMatrix, CMatrix) {
        let dims = self.split.dims();
        let tr1 = partial_trace_matrix(self.interaction.matrix(), dims, 1).expect("bipartite");
        let tr2 = partial_trace_matrix(self.interaction.matrix(), dims, 0).expect("bipartite");
        (tr1, tr2)
    }

    /// Largest Frobenius norm among the two certificate traces.
    pub fn certificate_residual(&self) -> f64 {
        let (a, b) = self.certificate();
        frobenius(&a).max(frobenius(&b))
    }

    /// Whether the certificate holds at `TOL·‖H‖_F`.
    pub fn is_certified(&self) -> bool {
        self.certificate_residual() <= TOL * self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Pieces of the orthogonal projection of `w` (a `pq×pq` matrix) onto local operators.
pub(crate) struct Projection {
    pub h1: CMatrix,
    pub h2: CMatrix,
    pub shift: f64,
    pub interaction: CMatrix,
}

pub(crate) fn project_local(w: &CMatrix, p: usize, q: usize) -> Projection {
    let n = p * q;
    let mut h1 = CMatrix::zeros(p, p);
    let mut h2 = CMatrix::zeros(q, q);
    for a in 0..p {
        for b in 0..p {
            let mut s = Complex64::from(0.0);
            for j in 0..q {
                s += w[(a * q + j, b * q + j)];
            }
            h1[(a, b)] = s / q as f64;
        }
    }
    for j in 0..q {
        for k in 0..q {
            let mut s = Complex64::from(0.0);
            for a in 0..p {
                s += w[(a * q + j, a * q + k)];
            }
            h2[(j, k)] = s / p as f64;
        }
    }
    let shift = w.trace().re / n as f64;
    let mut interaction = w.clone();
    for a in 0..p {
        for b in 0..p {
            for j in 0..q {
                interaction[(a * q + j, b * q + j)] -= h1[(a, b)];
            }
        }
    }
    for a in 0..p {
        for j in 0..q {
            for k in 0..q {
                interaction[(a * q + j, a * q + k)] -= h2[(j, k)];
            }
        }
        for j in 0..q {
            interaction[(a * q + j, a * q + j)] += Complex64::from(shift);
        }
    }
    Projection {
        h1,
        h2,
        shift,
        interaction,
    }
}

/// Squared Frobenius norm of the interaction part of `w`, without forming it.
pub(crate) fn interaction_norm_sqr(w: &CMatrix, p: usize, q: usize) -> f64 {
    let proj = project_local(w, p, q);
    proj.interaction.iter().map(|z| z.norm_sqr()).sum()
}

fn require_hermitian(h: &Operator) -> Result<()> {
    if !h.is_hermitian() {
        let dev = h.hermiticity_deviation();
        if dev > TOL * (1.0 + h.frobenius_norm()) {
            return Err(Error::NotHermitian(dev));
        }
    }
    Ok(())
}

/// Closest local Hamiltonian to `h` in Hilbert–Schmidt norm, under the
/// bipartite factorization `f`:
/// `H1 = Tr₂(H)/q`, `H2 = Tr₁(H)/p`, `c = Tr(H)/(pq)`, `Hint = H − H1⊗I − I⊗H2 + c·I`.
pub fn nearest_local_decomposition(h: &Operator, f: &Factorization) -> Result<LocalDecomposition> {
    require_hermitian(h)?;
    let (p, q) = f.split().as_bipartite()?;
    let w = f.operator_in_frame(h)?;
    let w = (&w + w.adjoint()) * Complex64::from(0.5);
    let proj = project_local(&w, p, q);
    Ok(LocalDecomposition {
        h1: Operator::hermitian_unchecked(proj.h1),
        h2: Operator::hermitian_unchecked(proj.h2),
        shift: proj.shift,
        interaction: Operator::hermitian_unchecked(proj.interaction),
        split: f.split().clone(),
        scale: h.frobenius_norm(),
    })
}

/// `‖Hint·ψ‖`, the part of the interaction that acts on this particular state.
pub fn interaction_action(h: &Operator, f: &Factorization, psi: &State) -> Result<f64> {
    let d = nearest_local_decomposition(h, f)?;
    let coords = f.state_in_frame(psi)?;
    Ok((d.interaction.matrix() * coords.amplitudes()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{c, OrthonormalBasis};

    fn local_h() -> Operator {
        let a = Operator::hermitian(CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(-2.0, 0.0)],
        ))
        .unwrap();
        let b = Operator::diagonal(&[0.0, 1.5, -0.5]);
        kron(&[a, Operator::identity(3)])
            .unwrap()
            .add(&kron(&[Operator::identity(2), b]).unwrap())
            .unwrap()
    }

    fn split23() -> Factorization {
        Factorization::canonical(TensorSplit::new(vec![2, 3]).unwrap())
    }

    #[test]
    fn local_hamiltonian_has_no_interaction() {
        let d = nearest_local_decomposition(&local_h(), &split23()).unwrap();
        assert!(d.interaction_norm() < 1e-14);
        assert!((d.reconstruct() - local_h().matrix()).norm() < 1e-14);
        for k in 0..6 {
            let psi = State::basis(6, k);
            assert!(interaction_action(&local_h(), &split23(), &psi).unwrap() < 1e-14);
        }
    }

    #[test]
    fn coupling_survives_and_is_certified() {
        // σ_x ⊗ diag(1, 0, −1) has vanishing partial traces, so it is pure interaction
        let sx = Operator::hermitian(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        let coupling = kron(&[sx, Operator::diagonal(&[1.0, 0.0, -1.0])]).unwrap();
        let h = local_h().add(&coupling).unwrap();
        let d = nearest_local_decomposition(&h, &split23()).unwrap();
        assert!((d.interaction.matrix() - coupling.matrix()).norm() < 1e-14);
        assert!(d.is_certified());
    }

    #[test]
    fn rejects_non_bipartite_and_non_hermitian() {
        let f = Factorization::canonical(TensorSplit::new(vec![2, 2, 2]).unwrap());
        assert!(matches!(
            nearest_local_decomposition(&Operator::identity(8), &f),
            Err(Error::NotBipartite(3))
        ));
        let m = CMatrix::from_fn(6, 6, |i, j| c(if i < j { 1.0 } else { 0.0 }, 0.0));
        assert!(nearest_local_decomposition(&Operator::new(m).unwrap(), &split23()).is_err());
    }

    #[test]
    fn decomposition_is_taken_in_the_factorization_basis() {
        // Reversing the basis order relabels (i, j) -> (1−i, 2−j): still local.
        let rev = CMatrix::from_fn(6, 6, |i, j| c(if i + j == 5 { 1.0 } else { 0.0 }, 0.0));
        let f = Factorization::row_major(
            OrthonormalBasis::from_matrix(rev).unwrap(),
            TensorSplit::new(vec![2, 3]).unwrap(),
        )
        .unwrap();
        let d = nearest_local_decomposition(&local_h(), &f).unwrap();
        assert!(d.interaction_norm() < 1e-14);
    }
}
