//! Seeded inputs shared by the benchmarks.

use nirvana_core::hilbert::{kron, Operator};
use nirvana_core::random::{random_hermitian, random_unitary};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `A⊗I + I⊗B` for random `A` (`p×p`) and `B` (`q×q`).
pub fn local(rng: &mut ChaCha8Rng, p: usize, q: usize) -> Operator {
    let a = kron(&[random_hermitian(rng, p), Operator::identity(q)]).expect("square");
    let b = kron(&[Operator::identity(p), random_hermitian(rng, q)]).expect("square");
    a.add(&b).expect("same dimension")
}

/// A local operator disguised by a random change of basis.
pub fn hidden_local(rng: &mut ChaCha8Rng, p: usize, q: usize) -> Operator {
    let w = random_unitary(rng, p * q);
    local(rng, p, q).conjugate_by(&w).expect("same dimension")
}

/// Sorted sums `a_i + b_j` for random `a`, `b`.
pub fn sumset_spectrum(rng: &mut ChaCha8Rng, p: usize, q: usize) -> Vec<f64> {
    use rand::Rng;
    let a: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
    let b: Vec<f64> = (0..q).map(|_| rng.random_range(-2.0..2.0)).collect();
    let mut s: Vec<f64> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x + y))
        .collect();
    s.sort_by(f64::total_cmp);
    s
}
