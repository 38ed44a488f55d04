use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Factor dimensions of a tensor-product presentation, e.g. `[3, 2]`.
///
/// Flat indices are row-major: the last factor varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TensorSplit {
    dims: Vec<usize>,
}

impl TensorSplit {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSplit("no factors".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidSplit(format!("factor dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    pub fn bipartite(p: usize, q: usize) -> Result<Self> {
        Self::new(vec![p, q])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    /// Ambient dimension, the product of the factor dimensions.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// `(p, q)` for a two-factor split.
    pub fn as_bipartite(&self) -> Result<(usize, usize)> {
        match self.dims[..] {
            [p, q] => Ok((p, q)),
            _ => Err(Error::NotBipartite(self.dims.len())),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::InvalidSplit(format!(
                "factor product {} does not match dimension {dim}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.dims.len() {
            return Err(Error::InvalidLabeling(format!(
                "multi-index {multi:?} has wrong length for split {:?}",
                self.dims
            )));
        }
        multi
            .iter()
            .zip(&self.dims)
            .try_fold(0usize, |acc, (&i, &d)| {
                if i >= d {
                    Err(Error::InvalidLabeling(format!(
                        "index {i} out of range {d}"
                    )))
                } else {
                    Ok(acc * d + i)
                }
            })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
        out
    }

    /// Row-major enumeration of the multi-index lattice.
    pub fn lattice(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.dim()).map(|k| self.multi_index(k))
    }

    /// All two-factor splits `p×q` of `dim` with `p, q ≥ 2`, smallest `p` first.
    pub fn bipartitions_of(dim: usize) -> Vec<(usize, usize)> {
        (2..dim)
            .filter(|p| dim.is_multiple_of(*p) && dim / p >= 2)
            .map(|p| (p, dim / p))
            .collect()
    }
}

impl TryFrom<Vec<usize>> for TensorSplit {
    type Error = Error;
    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<TensorSplit> for Vec<usize> {
    fn from(s: TensorSplit) -> Self {
        s.dims
    }
}
