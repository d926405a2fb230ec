//! Crate-wide error type and result alias.

use crate::channel::ValidationReport;
use thiserror::Error;

/// Errors produced by matrix kernels, channel construction and the harness.
#[derive(Debug, Clone, Error)]
pub enum QchanError {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    /// A matrix has the wrong shape for the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A hermitian input was required but the defect exceeds tolerance.
    #[error("matrix is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    /// A positive semidefinite input was required.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    /// The iterative eigensolver did not converge.
    #[error("eigensolver failed to converge")]
    EigenFailed,
    /// A parameter fell outside its admissible range; the bound is named.
    #[error("parameter {name} = {value} violates {bound}")]
    InvalidParameter {
        name: String,
        value: String,
        bound: String,
    },
    /// A channel failed the CP/TP/hermiticity/trace checks.
    #[error("channel validation failed: {0}")]
    Validation(Box<ValidationReport>),
    /// A vector that must be a probability distribution is not one.
    #[error("not a probability distribution: {0}")]
    NotDistribution(String),
    /// Input text or structure could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// File-system failure while reading or writing harness inputs.
    #[error("io error: {0}")]
    Io(String),
    /// A numerical procedure left its domain of validity.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<std::io::Error> for QchanError {
    fn from(e: std::io::Error) -> Self {
        QchanError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QchanError>;
