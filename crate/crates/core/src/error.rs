use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("trace is {0:.12}, expected 1")]
    BadTrace(f64),
    #[error("matrix has eigenvalue {0:.3e} below the positivity tolerance")]
    NegativeEigenvalue(f64),
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unknown gate name `{0}`")]
    UnknownGate(String),
    #[error("malformed matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
