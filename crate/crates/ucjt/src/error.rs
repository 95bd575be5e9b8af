//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by configuration validation, numerical evaluation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of range or inconsistent with the model
    /// assumptions (e.g. a path-loss exponent that makes the interference
    /// field diverge).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A numerical routine failed to reach its accuracy target, or produced
    /// a non-finite intermediate value.
    #[error("numerical evaluation failed: {0}")]
    Numerical(String),

    /// Errors from reading or writing experiment files.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Errors from parsing a TOML configuration or an embedded CSV header.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code associated with this error for the CLI:
    /// configuration and parse problems exit with 2, numerical failures
    /// with 3, I/O problems with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
