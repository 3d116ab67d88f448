//! Error types shared across the simulation core.

use thiserror::Error;

/// Errors produced by scenario construction, solvers, and the oracle.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A vector argument does not have the dimension the callee requires.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The exhaustive association sweep would enumerate too many profiles.
    #[error("association space too large: {combinations} profiles exceed the limit of {limit}")]
    AssociationSpaceTooLarge { combinations: u128, limit: u128 },

    /// Underlying I/O failure (CSV emission and friends).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Configuration file could not be parsed.
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
