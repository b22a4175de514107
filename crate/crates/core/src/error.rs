//! Error types shared across the crate.

use crate::spectral::SingularTriplet;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, KopaError>;

#[derive(Debug, thiserror::Error)]
pub enum KopaError {
    /// Shapes do not line up (matrix sizes, configuration vs. matrix, k out
    /// of range, vector length mismatches, dimension overflow).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input is outside an operation's mathematical domain (zero matrix,
    /// negative weights, arguments outside [0, π/2], ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Power iteration hit the iteration cap before reaching the requested
    /// tolerance. Carries the best iterate so callers can degrade gracefully.
    #[error("did not converge within {iterations} iterations (estimated relative error {rel_err:.3e})")]
    Convergence {
        iterations: usize,
        rel_err: f64,
        best: Box<SingularTriplet>,
    },

    /// Malformed input file. `offset` is a byte position where parsing failed.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl KopaError {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        KopaError::Dimension(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        KopaError::Domain(msg.into())
    }
}
