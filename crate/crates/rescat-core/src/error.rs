//! Error type shared by all workbench modules.

use thiserror::Error;

/// Errors reported by matrix, channel, free-set and catalysis operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem label collision: {0}")]
    LabelCollision(String),

    #[error("unknown subsystem label: {0}")]
    UnknownLabel(String),

    #[error("matrix is not Hermitian: max |m - m†| entry is {deviation:.3e} (tol {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e} (tol {tol:.3e})")]
    NotPsd { min_eig: f64, tol: f64 },

    #[error("trace is {trace:.12e}, expected 1 (tol {tol:.3e})")]
    TraceNotOne { trace: f64, tol: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid free set: {0}")]
    InvalidFreeSet(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
