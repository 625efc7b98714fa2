use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the domain: {0}")]
    OutsideDomain(String),
    #[error("distance function is not smooth at this point (medial axis): {0}")]
    MedialAxis(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("value outside the valid range: {0}")]
    DomainError(String),
    #[error("linear system is singular: {0}")]
    SingularSystem(String),
    #[error("iteration did not converge: last relative residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("stencil does not fit: {0}")]
    Stencil(String),
    #[error("no sign-definite neighborhood found: {0}")]
    CertificationFailure(String),
    #[error("quantity is undefined: {0}")]
    Undefined(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
