use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{kind}: {source}", kind = .0.kind(), source = .0)]
    Domain(#[from] qbtangle_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn config(origin: &str, line: usize, msg: impl std::fmt::Display) -> Self {
        CliError::Usage(format!("{origin}:{line}: {msg}"))
    }

    /// 1 for usage, configuration and I/O problems; 2 for domain errors
    /// and failed verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) | CliError::VerificationFailed => 2,
        }
    }
}
