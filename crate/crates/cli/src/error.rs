use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] wstate_core::Error),

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(wstate_core::Error::Capacity { .. }) => EXIT_CAPACITY,
            CliError::Core(_) | CliError::Usage(_) => EXIT_UNSUPPORTED,
            CliError::Io { .. } => EXIT_IO,
            CliError::VerificationFailed(_) => EXIT_VERIFICATION_FAILED,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
