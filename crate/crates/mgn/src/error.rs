//! Error types shared across the crate.

use thiserror::Error;

/// Unified error type. Variants mirror the failure classes surfaced at the
/// CLI: bad arguments, exceeded budgets, and the various ways an exactness
/// or structure check can fail.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain arguments.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configured time or size budget was exceeded.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A truncated-series operation could not keep every retained
    /// coefficient exact. Never silently truncated; always an error.
    #[error("exactness violation: {0}")]
    ExactnessViolation(String),

    /// An interpolation grid with too little rank to determine the fit.
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    /// Overdetermined interpolation residuals failed to vanish: the sampled
    /// data is not the polynomial it was claimed to be.
    #[error("polynomiality violation: {0}")]
    PolynomialityViolation(String),

    /// Fitted data violates a structural constraint (parity, degree band,
    /// or a cross-table identity).
    #[error("structure violation: {0}")]
    StructureViolation(String),

    /// Internal consistency check failed (conflicting cached values,
    /// unreachable recursion state). Indicates a bug, not bad input.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// A persisted cache file contains a malformed record.
    #[error("cache integrity error at line {line}: {msg}")]
    CacheIntegrity { line: usize, msg: String },

    /// A verification subcommand ran to completion and the property it
    /// checks does not hold.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
