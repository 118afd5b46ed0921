use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Domain(String),

    /// Array or grid lengths do not agree.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// The wave function has zero (or non-finite) norm.
    #[error("wave function has zero norm")]
    ZeroNorm,

    /// An adaptive integration could not continue.
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    /// An iterative search did not converge.
    #[error("no convergence in {what}: best residual {residual:e}")]
    NoConvergence { what: String, residual: f64 },

    /// A shooting integration overflowed before the matching radius.
    #[error("overflow during outward integration at r = {radius}")]
    Overflow { radius: f64 },

    /// Significant amplitude reached the edge of the grid.
    #[error("grid violation in {space} space at t = {t}: edge/max = {ratio:e}")]
    GridViolation { space: &'static str, t: f64, ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
