use nalgebra::SVD;

use super::{identity, CMatrix, CVector, Complex64, Operator, State, TOL};
use crate::error::{Error, Result};

/// Smallest singular value below which input vectors count as dependent.
const INDEPENDENCE_FLOOR: f64 = 1e-8;

/// A complete orthonormal basis, stored as the columns of a unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    vectors: CMatrix,
}

impl OrthonormalBasis {
    pub fn new(vectors: &[State]) -> Result<Self> {
        let dim = vectors
            .first()
            .ok_or(Error::EmptyInput("basis with no vectors"))?
            .dim();
        if vectors.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: vectors.len(),
            });
        }
        if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        let columns: Vec<CVector> = vectors.iter().map(|v| v.amplitudes().clone()).collect();
        Self::from_matrix(CMatrix::from_columns(&columns))
    }

    /// Columns of `m` are the basis vectors.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        let gram = m.adjoint() * &m;
        let dev = (gram - identity(m.nrows()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { vectors: m })
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self { vectors: m }
    }

    pub fn standard(dim: usize) -> Self {
        Self {
            vectors: identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> State {
        State::from_vector_unchecked(self.vectors.column(k).into_owned())
    }

    pub fn vectors(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.dim()).map(|k| self.vector(k))
    }

    /// Coordinates `⟨e_k|ψ⟩` of a vector in this basis.
    pub fn components(&self, v: &CVector) -> CVector {
        self.vectors.adjoint() * v
    }

    pub fn reconstruct(&self, components: &CVector) -> CVector {
        &self.vectors * components
    }

    /// The change-of-basis unitary whose columns are the basis vectors.
    pub fn as_unitary(&self) -> Operator {
        Operator::from_parts(self.vectors.clone(), false, true)
    }

    /// Maximum entry deviation of the Gram matrix from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        (self.vectors.adjoint() * &self.vectors - identity(self.dim()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Unitary that exchanges two orthonormal vectors and fixes their orthogonal
/// complement: `U = I − |a⟩⟨a| − |b⟩⟨b| + |b⟩⟨a| + |a⟩⟨b|`.
pub fn swap_basis_unitary(e1: &State, e2: &State) -> Result<Operator> {
    let overlap = super::inner(e1, e2)?;
    if overlap.norm() > TOL {
        return Err(Error::NotOrthonormal(overlap.norm()));
    }
    let a = e1.amplitudes();
    let b = e2.amplitudes();
    let d = a - b;
    // I − |a−b⟩⟨a−b| is the reflection through the hyperplane orthogonal to a−b.
    let m = identity(e1.dim()) - &d * d.adjoint();
    Ok(Operator::from_parts(m, true, true))
}

fn project_out(v: &mut CVector, onto: &[CVector]) {
    // two passes keep orthogonality at round-off level
    for _ in 0..2 {
        for u in onto {
            let coeff = u.dotc(v);
            *v -= u * coeff;
        }
    }
}

/// Completes linearly independent vectors to a full orthonormal basis.
///
/// The first `k` output vectors span the input; an already orthonormal input is
/// reproduced. Completion vectors are taken from the standard basis, at each
/// step picking the one with the largest component outside the current span
/// (lowest index on ties).
pub fn gram_schmidt_complete(partial: &[State]) -> Result<OrthonormalBasis> {
    let dim = partial
        .first()
        .ok_or(Error::EmptyInput("nothing to complete"))?
        .dim();
    if let Some(bad) = partial.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.dim(),
        });
    }
    if partial.len() > dim {
        return Err(Error::LinearlyDependent(0.0));
    }
    let cols: Vec<CVector> = partial.iter().map(|s| s.amplitudes().clone()).collect();
    let svd = SVD::new(CMatrix::from_columns(&cols), false, false);
    let smallest = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest < INDEPENDENCE_FLOOR {
        return Err(Error::LinearlyDependent(smallest));
    }

    let mut out: Vec<CVector> = Vec::with_capacity(dim);
    for v in cols {
        let mut w = v;
        project_out(&mut w, &out);
        let n = w.norm();
        out.push(w / Complex64::from(n));
    }
    while out.len() < dim {
        let mut best: Option<(f64, CVector)> = None;
        for k in 0..dim {
            let mut w = CVector::zeros(dim);
            w[k] = Complex64::from(1.0);
            project_out(&mut w, &out);
            let n = w.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn + 1e-12) {
                best = Some((n, w));
            }
        }
        let (n, w) = best.expect("dim > 0");
        out.push(w / Complex64::from(n));
    }
    Ok(OrthonormalBasis {
        vectors: CMatrix::from_columns(&out),
    })
}
