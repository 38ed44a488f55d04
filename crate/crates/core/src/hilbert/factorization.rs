use std::collections::HashSet;

use super::{CMatrix, CVector, Operator, OrthonormalBasis, State, TensorSplit};
use crate::error::{Error, Result};

/// An orthonormal basis together with a bijective labeling of its vectors by
/// multi-indices of a [`TensorSplit`]. The labeling is what defines the
/// subsystems: `|e_{ij}⟩ = |f_i⟩ ⊗ |g_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    basis: OrthonormalBasis,
    split: TensorSplit,
    labels: Vec<Vec<usize>>,
    /// Basis vectors reordered so that column `flat(label)` holds the vector with that label.
    lattice_frame: CMatrix,
}

impl Factorization {
    /// `labels[k]` is the multi-index given to basis vector `k`.
    pub fn new(
        basis: OrthonormalBasis,
        split: TensorSplit,
        labels: Vec<Vec<usize>>,
    ) -> Result<Self> {
        split.check_dim(basis.dim())?;
        if labels.len() != basis.dim() {
            return Err(Error::InvalidLabeling(format!(
                "{} labels for {} basis vectors",
                labels.len(),
                basis.dim()
            )));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        let mut lattice_frame = CMatrix::zeros(basis.dim(), basis.dim());
        for (k, label) in labels.iter().enumerate() {
            let flat = split.flat_index(label)?;
            if !seen.insert(flat) {
                return Err(Error::InvalidLabeling(format!(
                    "label {label:?} used twice"
                )));
            }
            lattice_frame.set_column(flat, &basis.matrix().column(k));
        }
        Ok(Self {
            basis,
            split,
            labels,
            lattice_frame,
        })
    }

    /// Basis vector `k` gets the `k`-th multi-index in row-major order.
    pub fn row_major(basis: OrthonormalBasis, split: TensorSplit) -> Result<Self> {
        let labels = split.lattice().collect();
        Self::new(basis, split, labels)
    }

    /// The standard basis with row-major labels: the split the space was built from.
    pub fn canonical(split: TensorSplit) -> Self {
        let basis = OrthonormalBasis::standard(split.dim());
        Self::row_major(basis, split).expect("standard basis fits its own split")
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.basis
    }

    pub fn split(&self) -> &TensorSplit {
        &self.split
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Unitary whose column `flat(i, j, …)` is `|e_{ij…}⟩`.
    pub fn lattice_frame(&self) -> &CMatrix {
        &self.lattice_frame
    }

    /// Coordinates `c_{ij…}` of a vector, laid out row-major over the split.
    pub fn coordinates(&self, v: &CVector) -> CVector {
        self.lattice_frame.adjoint() * v
    }

    /// The state as seen through this factorization, ready for split-aware tools.
    pub fn state_in_frame(&self, psi: &State) -> Result<State> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(State::from_vector_unchecked(
            self.coordinates(psi.amplitudes()),
        ))
    }

    /// Matrix of `op` in the labeled factorization basis.
    pub fn operator_in_frame(&self, op: &Operator) -> Result<CMatrix> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.dim(),
            });
        }
        Ok(self.lattice_frame.adjoint() * op.matrix() * &self.lattice_frame)
    }

    pub fn labeled_vector(&self, multi: &[usize]) -> Result<State> {
        let flat = self.split.flat_index(multi)?;
        Ok(State::from_vector_unchecked(
            self.lattice_frame.column(flat).into_owned(),
        ))
    }
}

/// A time-dependent factorization sampled on an explicit, strictly increasing grid.
#[derive(Clone, Debug)]
pub struct BasisTrajectory {
    times: Vec<f64>,
    frames: Vec<Factorization>,
}

impl BasisTrajectory {
    pub fn new(times: Vec<f64>, frames: Vec<Factorization>) -> Result<Self> {
        if times.len() != frames.len() {
            return Err(Error::InvalidTimes(format!(
                "{} times for {} frames",
                times.len(),
                frames.len()
            )));
        }
        check_increasing(&times)?;
        if let Some(first) = frames.first() {
            if let Some(bad) = frames
                .iter()
                .find(|f| f.dim() != first.dim() || f.split() != first.split())
            {
                return Err(Error::InvalidSplit(format!(
                    "frame split {:?} differs from {:?}",
                    bad.split().dims(),
                    first.split().dims()
                )));
            }
        }
        Ok(Self { times, frames })
    }

    /// The same factorization at every sample.
    pub fn constant(times: Vec<f64>, frame: Factorization) -> Result<Self> {
        let frames = vec![frame; times.len()];
        Self::new(times, frames)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[Factorization] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub(crate) fn check_increasing(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidTimes("non-finite time".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimes(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}
