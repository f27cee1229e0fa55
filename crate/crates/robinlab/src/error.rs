//! Error taxonomy shared across the crate.
//!
//! The variants map onto the CLI exit codes: configuration and argument
//! problems exit 2, numerical breakdowns exit 3, failed verifications exit 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied data was violated (bad mesh sizes,
    /// incompatible operator/mesh pairs, malformed boundary functions).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Problem configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    /// A solver or iteration failed to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A requested verification ran to completion and found a violation.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numeric, 4 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 2,
            Error::Numerical(_) | Error::Io(_) => 3,
            Error::Verification(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
