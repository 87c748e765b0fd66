use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |A - A†| = {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("state trace is {trace}, expected 1 within {tolerance:e}")]
    NotUnitTrace { trace: f64, tolerance: f64 },

    #[error("state has negative eigenvalue {eigenvalue:e} (tolerance {tolerance:e})")]
    NotPositive { eigenvalue: f64, tolerance: f64 },

    #[error(
        "basis is not biorthogonal: worst pair (alpha={alpha}, beta={beta}) deviates by {deviation:e}"
    )]
    BiorthogonalityViolated {
        alpha: usize,
        beta: usize,
        deviation: f64,
    },

    #[error("superoperator is not idempotent: |M^2 - M|_F = {defect:e}")]
    NotIdempotent { defect: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },

    #[error("no fit: {0}")]
    NoFit(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
