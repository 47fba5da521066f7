//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by problem construction, solvers, transforms and parsers.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix has a size incompatible with the problem dimensions.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A configuration value or argument is outside its valid range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The instance cannot define a meaningful problem (e.g. `A^T b = 0`).
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    /// A matrix required to have full rank does not.
    #[error("rank deficient: {0}")]
    RankDeficient(String),

    /// A dense factorization or decomposition failed.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// Armijo backtracking exceeded its hard cap without finding descent,
    /// signalling numerical breakdown of the Newton direction.
    #[error("line search stagnated after {steps} backtracking steps")]
    LineSearchStagnation { steps: usize },

    /// Malformed input data (LIBSVM text and friends).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
