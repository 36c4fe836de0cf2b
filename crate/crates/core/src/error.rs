use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semi-definite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("post-selection probability {0:e} is too small to condition on")]
    ZeroProbability(f64),

    #[error("Kraus operators are incomplete: |sum K^dag K - I| = {0:e}")]
    IncompleteChannel(f64),

    #[error("overlap modulus {0} exceeds 1")]
    OverlapOutOfRange(f64),
}
