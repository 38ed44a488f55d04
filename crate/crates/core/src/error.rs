use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("operator is not hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("vectors are linearly dependent (smallest singular value {0:e})")]
    LinearlyDependent(f64),

    #[error("invalid tensor split: {0}")]
    InvalidSplit(String),

    #[error("split must be bipartite, got {0} factors")]
    NotBipartite(usize),

    #[error("factor index {index} out of range for {factors} factors")]
    InvalidFactor { index: usize, factors: usize },

    #[error("labeling is not a bijection onto the split lattice: {0}")]
    InvalidLabeling(String),

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),

    #[error("invalid piecewise hamiltonian: {0}")]
    InvalidSegments(String),

    #[error("spectrum has {len} values but the split needs {expected}")]
    SpectrumSize { len: usize, expected: usize },

    #[error("no valid factor pair for dimension {0}")]
    NoFactorPair(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Serde(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
