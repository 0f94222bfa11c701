use thiserror::Error;

/// Errors raised by the library. Failed verifications are reported through
/// result types, not through this enum.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("invalid letter substitution: {0}")]
    InvalidSubstitution(String),

    #[error("polynomial is not a Bell expression: {0}")]
    NotAnExpression(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("numerical breakdown in solver: {0}")]
    SolverBreakdown(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
