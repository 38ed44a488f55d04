//! Text formats shared by every module and the CLI.
//!
//! Dense vectors and matrices are `{"dim": n, "re": [...], "im": [...]}`;
//! matrices are row-major with `n²` entries. A missing `im` means all zeros.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    CMatrix, CVector, Complex64, Factorization, Operator, OrthonormalBasis, State, TensorSplit,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl DenseJson {
    pub fn from_vector(v: &CVector) -> Self {
        Self {
            dim: v.len(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { dim: n, re, im }
    }

    fn entries(&self, expected: usize) -> Result<Vec<Complex64>> {
        if self.re.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.re.len(),
            });
        }
        let im = if self.im.is_empty() {
            vec![0.0; expected]
        } else {
            self.im.clone()
        };
        if im.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: im.len(),
            });
        }
        Ok(self
            .re
            .iter()
            .zip(&im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect())
    }

    pub fn to_vector(&self) -> Result<CVector> {
        Ok(CVector::from_vec(self.entries(self.dim)?))
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let e = self.entries(self.dim * self.dim)?;
        Ok(CMatrix::from_row_slice(self.dim, self.dim, &e))
    }

    pub fn to_state(&self) -> Result<State> {
        State::from_vector(self.to_vector()?)
    }

    /// Parses and certifies a hermitian operator.
    pub fn to_hermitian(&self) -> Result<Operator> {
        Operator::hermitian(self.to_matrix()?)
    }
}

/// A factorization on disk: basis vectors are the matrix columns; `labels[k]`
/// is the multi-index of column `k` (row-major when absent).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub split: Vec<usize>,
    pub basis: DenseJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<usize>>>,
}

impl FactorizationJson {
    pub fn from_factorization(f: &Factorization) -> Self {
        Self {
            split: f.split().dims().to_vec(),
            basis: DenseJson::from_matrix(f.basis().matrix()),
            labels: Some(f.labels().to_vec()),
        }
    }

    pub fn to_factorization(&self) -> Result<Factorization> {
        let split = TensorSplit::new(self.split.clone())?;
        let basis = OrthonormalBasis::from_matrix(self.basis.to_matrix()?)?;
        match &self.labels {
            Some(l) => Factorization::new(basis, split, l.clone()),
            None => Factorization::row_major(basis, split),
        }
    }
}

/// A real spectrum: a JSON array, or numbers separated by whitespace/commas.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    trimmed
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a number: {t:?}")))
        })
        .collect()
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline. Floats use the shortest representation
/// that round-trips, so identical values always print identically.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
