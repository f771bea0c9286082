//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CtError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value at line {line}: {message}")]
    Value { line: usize, message: String },

    #[error("unsupported shape: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("flip refinement did not converge within {} attempts (best delta {} vs cutoff {cutoff})", best.flip_attempts, best.delta_final)]
    NonConvergence {
        /// Best state reached when the attempt budget ran out.
        best: Box<crate::null_model::SynthesisRecord>,
        cutoff: f64,
    },

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, CtError>;
