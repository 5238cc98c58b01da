//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by povmkit operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("superoperator is singular: eigenvalue {eigenvalue:.6e} at or below threshold {threshold:.3e}")]
    Singular { eigenvalue: f64, threshold: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("POVM is not informationally complete (smallest relative eigenvalue {lambda_min:.3e})")]
    NotInformationallyComplete { lambda_min: f64 },

    #[error(
        "POVM is not a tight IC-POVM (residual {residual:.3e}, frame constant {frame_constant:.3e})"
    )]
    NotTight { residual: f64, frame_constant: f64 },

    #[error("not a dual frame: resolution-of-identity residual {residual:.3e}")]
    NotADualFrame { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tensor space dimension {dim} exceeds configured limit {limit}")]
    SizeLimit { dim: usize, limit: usize },

    #[error("eigensolver failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
