//! Dense complex linear algebra for finite-dimensional state spaces.
//!
//! Everything here is an immutable value: states, operators, bases, splits
//! and factorizations are validated at construction and never mutated.

mod basis;
pub(crate) mod factorization;
mod operator;
mod reduce;
mod split;
mod state;

pub use basis::{gram_schmidt_complete, swap_basis_unitary, OrthonormalBasis};
pub use factorization::{BasisTrajectory, Factorization};
pub(crate) use operator::eigh_matrix;
pub use operator::{eigh, kron, Eigen, Operator};
pub use reduce::{
    density, entanglement_entropy, entropy_of_probabilities, partial_trace, partial_trace_matrix,
    schmidt, von_neumann_entropy, Schmidt,
};
pub use split::TensorSplit;
pub use state::{inner, phase_aligned_distance, tensor, State};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Construction and certification tolerance.
pub const TOL: f64 = 1e-10;

/// Relative residual allowed for eigenpairs, scaled by the Frobenius norm.
pub const EIGEN_TOL: f64 = 1e-9;

/// Schmidt coefficients below this are reported as exactly zero.
pub const SCHMIDT_FLOOR: f64 = 1e-12;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}
