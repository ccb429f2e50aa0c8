use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// No solver start reached the gradient tolerance. Carries the lowest-objective iterate.
    #[error("solver did not converge (best iterate {best:?}, gradient norm {gradient_norm:e})")]
    NonConvergence { best: [f64; 3], gradient_norm: f64 },

    #[error("curve has no converged samples")]
    EmptyCurve,

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
