//! Seeded random states and operators for tests, benchmarks and optimizer restarts.

use nalgebra::linalg::QR;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{CMatrix, CVector, Complex64, Operator, State};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly (Haar) distributed unit vector.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> State {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    State::normalized(v).expect("gaussian vector is nonzero")
}

/// Hermitian matrix from the Gaussian unitary ensemble, entries of order 1.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let a = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let h = (&a + a.adjoint()) * Complex64::from(0.5);
    Operator::hermitian(h).expect("symmetrized matrix is hermitian")
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Operator {
    let a = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = QR::new(a);
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::from(1.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Operator::unitary(q).expect("QR factor is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_satisfy_their_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [1, 2, 5, 12] {
            assert!((random_state(&mut rng, dim).norm() - 1.0).abs() < 1e-12);
            assert!(random_hermitian(&mut rng, dim).is_hermitian());
            assert!(random_unitary(&mut rng, dim).unitarity_deviation() < 1e-12);
        }
    }
}
