use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("no semi-conjugacy found: {0}")]
    NotFound(String),
    #[error("verification failed: residual {residual:e} exceeds {tolerance:e} ({what})")]
    Verification {
        what: String,
        residual: f64,
        tolerance: f64,
    },
    #[error("leading time coefficient is not invertible: {0}")]
    NonInvertibleLeading(String),
    #[error("amplification {factor:e} exceeds cap {cap:e} at t = {t}")]
    Amplification { factor: f64, cap: f64, t: f64 },
    #[error("time {t} outside the available trajectory ({reason})")]
    Coverage { t: f64, reason: String },
    #[error("field is not supported away from the box boundary: tail mass {tail:e} > {limit:e}")]
    Support { tail: f64, limit: f64 },
    #[error("unknown catalog entry `{0}`")]
    Catalog(String),
    #[error("no kernel element at this wavevector")]
    NoKernel,
    #[error("momentum lattice is not symmetric under p -> -p")]
    AsymmetricLattice,
    #[error("generator relations fail: {0}")]
    Relations(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
