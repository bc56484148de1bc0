use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: bad shapes, out-of-range mode indices, non-finite numbers.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Well-formed input that violates a physical constraint
    /// (unitarity, symplecticity, canonical commutation relations).
    #[error("constraint violated: {check} residual {residual:.3e} exceeds {tol:.3e}")]
    ConstraintViolation {
        check: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("matrix is singular to tolerance (smallest singular value {0:.3e})")]
    SingularInput(f64),

    #[error("numerical failure: {reason} (achieved residual {residual:.3e})")]
    NumericalFailure { reason: String, residual: f64 },

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
