use std::path::PathBuf;

use thiserror::Error;

use crate::manifest::ManifestError;

/// Exit status contract of the `ddrank` binary.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_TRAINING: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Core(#[from] ddrank_core::Error),
    #[error("{0}")]
    Validation(String),
    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
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
            CliError::Manifest(ManifestError::Read { .. }) => EXIT_IO,
            CliError::Manifest(_) | CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_training_failure() => EXIT_TRAINING,
            CliError::Core(e) if e.is_io() => EXIT_IO,
            CliError::Core(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}
