use nalgebra::SymmetricEigen;

use super::{frobenius, identity, CMatrix, CVector, Complex64, OrthonormalBasis, State, TOL};
use crate::error::{Error, Result};

/// A square complex matrix with optional hermitian/unitary certification.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    hermitian: bool,
    unitary: bool,
}

impl Operator {
    /// Uncertified operator.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        if matrix.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self {
            matrix,
            hermitian: false,
            unitary: false,
        })
    }

    /// Certifies `‖A − A†‖_F ≤ TOL·(1 + ‖A‖_F)`.
    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix)?.certify_hermitian()
    }

    /// Certifies `‖A†A − I‖_F ≤ TOL`.
    pub fn unitary(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix)?.certify_unitary()
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: identity(dim),
            hermitian: true,
            unitary: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
            hermitian: true,
            unitary: false,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::from(x)));
        Self {
            matrix: CMatrix::from_diagonal(&d),
            hermitian: true,
            unitary: false,
        }
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &State, b: &State) -> Result<Self> {
        Self::new(a.amplitudes() * b.amplitudes().adjoint())
    }

    /// For matrices that are hermitian by construction up to round-off.
    pub(crate) fn hermitian_unchecked(matrix: CMatrix) -> Self {
        Self {
            matrix,
            hermitian: true,
            unitary: false,
        }
    }

    pub(crate) fn from_parts(matrix: CMatrix, hermitian: bool, unitary: bool) -> Self {
        Self {
            matrix,
            hermitian,
            unitary,
        }
    }

    pub fn certify_hermitian(mut self) -> Result<Self> {
        let dev = self.hermiticity_deviation();
        if dev > TOL * (1.0 + self.frobenius_norm()) {
            return Err(Error::NotHermitian(dev));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn certify_unitary(mut self) -> Result<Self> {
        let dev = self.unitarity_deviation();
        if dev > TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.unitary = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        frobenius(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        frobenius(&(self.matrix.adjoint() * &self.matrix - identity(n)))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other,
            });
        }
        Ok(())
    }

    /// Matrix product; unitarity is preserved when both factors are unitary.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            hermitian: false,
            unitary: self.unitary && other.unitary,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
            unitary: false,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::from(factor),
            hermitian: self.hermitian,
            unitary: false,
        }
    }

    /// `V·A·V†`.
    pub fn conjugate_by(&self, v: &Operator) -> Result<Self> {
        self.check_dim(v.dim())?;
        Ok(Self {
            matrix: &v.matrix * &self.matrix * v.matrix.adjoint(),
            hermitian: self.hermitian && v.unitary,
            unitary: self.unitary && v.unitary,
        })
    }

    pub fn apply_vector(&self, v: &CVector) -> Result<CVector> {
        self.check_dim(v.len())?;
        Ok(&self.matrix * v)
    }

    /// Applies a certified unitary to a state.
    pub fn apply(&self, psi: &State) -> Result<State> {
        let v = self.apply_vector(psi.amplitudes())?;
        if self.unitary {
            Ok(State::from_vector_unchecked(v))
        } else {
            State::from_vector(v)
        }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &State) -> Result<Complex64> {
        let v = self.apply_vector(psi.amplitudes())?;
        Ok(psi.amplitudes().dotc(&v))
    }
}

/// Kronecker product of operators, last factor fastest-varying.
pub fn kron(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or(Error::EmptyInput("kron of no operators"))?;
    let matrix = rest
        .iter()
        .fold(first.matrix.clone(), |acc, op| acc.kronecker(&op.matrix));
    Ok(Operator {
        matrix,
        hermitian: ops.iter().all(|o| o.hermitian),
        unitary: ops.iter().all(|o| o.unitary),
    })
}

/// Eigenvalues in ascending order together with the matching eigenbasis.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub basis: OrthonormalBasis,
}

/// Hermitian eigendecomposition. Inside degenerate eigenspaces the returned
/// vectors are an arbitrary orthonormal choice.
pub fn eigh(h: &Operator) -> Result<Eigen> {
    if !h.hermitian {
        let dev = h.hermiticity_deviation();
        if dev > TOL * (1.0 + h.frobenius_norm()) {
            return Err(Error::NotHermitian(dev));
        }
    }
    let (values, vectors) = eigh_matrix(&h.matrix);
    Ok(Eigen {
        values,
        basis: OrthonormalBasis::from_matrix_unchecked(vectors),
    })
}

/// Ascending eigenpairs of the hermitian part of `m`; columns are eigenvectors.
pub(crate) fn eigh_matrix(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::c;

    fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&[Operator::identity(2), Operator::identity(3)]).unwrap();
        assert_eq!(k.matrix(), &identity(6));
        assert!(k.is_hermitian() && k.is_unitary());
    }

    #[test]
    fn kron_sum_of_hermitians_is_hermitian() {
        let a = Operator::hermitian(sigma_y()).unwrap();
        let b = Operator::diagonal(&[1.0, 2.0, 3.0]);
        let h = kron(&[a, Operator::identity(3)])
            .unwrap()
            .add(&kron(&[Operator::identity(2), b]).unwrap())
            .unwrap();
        assert!(h.is_hermitian());
        assert!(h.hermiticity_deviation() < 1e-15);
    }

    #[test]
    fn kron_of_nothing_is_an_error() {
        assert!(kron(&[]).is_err());
    }

    #[test]
    fn certification_rejects_bad_input() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            Operator::hermitian(m.clone()),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(Operator::unitary(m), Err(Error::NotUnitary(_))));
        assert!(matches!(
            Operator::new(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        ));
    }

    #[test]
    fn eigh_of_identity() {
        let e = eigh(&Operator::identity(4)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn eigh_of_diagonal_sorts_and_permutes() {
        let e = eigh(&Operator::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        for (k, expected) in [1usize, 2, 0].into_iter().enumerate() {
            assert!(e
                .basis
                .vector(k)
                .equals_up_to_phase(&State::basis(3, expected), 1e-12));
        }
    }

    #[test]
    fn eigh_of_sigma_y_block_gives_plus_minus_omega() {
        // ω·i(|b⟩⟨a| − |a⟩⟨b|) on a two-level block has eigenvalues ±ω.
        let omega = 0.75;
        let h = Operator::hermitian(sigma_y() * Complex64::from(omega)).unwrap();
        let e = eigh(&h).unwrap();
        assert!((e.values[0] + omega).abs() < 1e-14);
        assert!((e.values[1] - omega).abs() < 1e-14);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(eigh(&Operator::new(m).unwrap()).is_err());
    }
}
