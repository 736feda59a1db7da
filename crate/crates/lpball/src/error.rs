use thiserror::Error;

/// Errors produced by solvers, projections and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("parameter `{name}` violates constraint: {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
    },

    #[error("point is infeasible: {0}")]
    Infeasible(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
