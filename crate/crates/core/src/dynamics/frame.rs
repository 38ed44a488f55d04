use super::{EvolutionTrace, PiecewiseHamiltonian};
use crate::error::{Error, Result};
use crate::hilbert::{
    gram_schmidt_complete, BasisTrajectory, Factorization, OrthonormalBasis, State, TensorSplit,
};

/// Coordinates `c_k(t) = ⟨e_k(t)|Ψ(t)⟩` of each state in the frame at the same
/// sample. Coordinates are laid out row-major over the frame's split. The time
/// grids must match exactly.
pub fn components_in_frame(
    times: &[f64],
    states: &[State],
    frame: &BasisTrajectory,
) -> Result<EvolutionTrace> {
    if frame.times() != times {
        return Err(Error::InvalidTimes(
            "state and frame time grids differ".into(),
        ));
    }
    let mut trace = EvolutionTrace::new(times.to_vec(), states.to_vec())?;
    let mut comps = Vec::with_capacity(states.len());
    for (f, s) in frame.frames().iter().zip(states) {
        if f.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                actual: s.dim(),
            });
        }
        comps.push(f.coordinates(s.amplitudes()));
    }
    trace.attach_frame(frame.clone(), comps);
    Ok(trace)
}

/// Frame that moves with the state: `e_k(t) = U(t, t₀)·e_k(t₀)`, where
/// `e_1(t₀) = ψ₀` and the rest of the initial basis is its Gram–Schmidt
/// completion. The first basis vector carries the label `(0, 0, …)`.
pub fn comoving_frame(
    h: &PiecewiseHamiltonian,
    psi0: &State,
    times: &[f64],
    split: &TensorSplit,
) -> Result<BasisTrajectory> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    split.check_dim(h.dim())?;
    let initial = gram_schmidt_complete(std::slice::from_ref(psi0))?;
    let frames = times
        .iter()
        .map(|&t| {
            let u = h.evolution_operator(t);
            let moved = OrthonormalBasis::from_matrix_unchecked(u.matrix() * initial.matrix());
            Factorization::row_major(moved, split.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    BasisTrajectory::new(times.to_vec(), frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_many, linspace};
    use crate::hilbert::Operator;

    #[test]
    fn standard_frame_gives_raw_amplitudes() {
        let split = TensorSplit::new(vec![2, 2]).unwrap();
        let times = vec![0.0, 1.0];
        let states = vec![
            State::basis(4, 1),
            State::from_real(&[0.6, 0.0, 0.0, 0.8]).unwrap(),
        ];
        let frame =
            BasisTrajectory::constant(times.clone(), Factorization::canonical(split)).unwrap();
        let trace = components_in_frame(&times, &states, &frame).unwrap();
        for (c, s) in trace.components().unwrap().iter().zip(&states) {
            assert_eq!(c, s.amplitudes());
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let split = TensorSplit::new(vec![2, 2]).unwrap();
        let frame =
            BasisTrajectory::constant(vec![0.0, 1.0], Factorization::canonical(split)).unwrap();
        let err = components_in_frame(
            &[0.0, 0.5],
            &[State::basis(4, 0), State::basis(4, 0)],
            &frame,
        );
        assert!(matches!(err, Err(Error::InvalidTimes(_))));
    }

    #[test]
    fn zero_hamiltonian_gives_constant_frame() {
        let h = PiecewiseHamiltonian::zero(4).unwrap();
        let psi = State::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let split = TensorSplit::new(vec![2, 2]).unwrap();
        let frame = comoving_frame(&h, &psi, &[0.0, 1.0, 2.0], &split).unwrap();
        let first = frame.frames()[0].lattice_frame();
        for f in frame.frames() {
            assert_eq!(f.lattice_frame(), first);
        }
    }

    #[test]
    fn state_sits_on_first_comoving_vector() {
        let h = Operator::diagonal(&[0.0, 1.0, 2.5, -1.0]);
        let h = PiecewiseHamiltonian::single(h, 0.0, 10.0).unwrap();
        let psi = State::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let split = TensorSplit::new(vec![2, 2]).unwrap();
        let times = linspace(0.0, 3.0, 7).unwrap();
        let frame = comoving_frame(&h, &psi, &times, &split).unwrap();
        let states = evolve_many(&h, &psi, &times).unwrap();
        let trace = components_in_frame(&times, &states, &frame).unwrap();
        for c in trace.components().unwrap() {
            assert!((c[0].re - 1.0).abs() < 1e-12 && c[0].im.abs() < 1e-12);
            assert!(c.iter().skip(1).all(|z| z.norm() < 1e-12));
        }
        assert!(trace.reconstruction_error().unwrap() < 1e-12);
    }
}
