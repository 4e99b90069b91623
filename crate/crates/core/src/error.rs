use thiserror::Error;

/// Every failure a public operation can report. Numerical routines return
/// one of these instead of letting NaN or infinity escape.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(String),

    #[error("argument {0} lies on the branch cut (-inf, 0]")]
    BranchCut(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("tolerance cannot be certified: {0}")]
    Tolerance(String),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("requested size exceeds capacity: {0}")]
    Capacity(String),

    #[error("ill-conditioned least-squares system: {0}")]
    IllConditioned(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("non-finite result: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
