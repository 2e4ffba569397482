use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid measurement set: {0}")]
    InvalidMeasurement(String),

    #[error("invalid assemblage: {0}")]
    InvalidAssemblage(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("polytope is not full-dimensional: {0}")]
    Degenerate(String),

    #[error("{what} exceeds the configured cap ({value} > {cap})")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },

    #[error("linear program is infeasible: {0}")]
    Infeasible(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
