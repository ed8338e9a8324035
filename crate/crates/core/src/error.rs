use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of the binary tensor container.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes {found:?}, expected \"DDRK\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown dtype code {0}")]
    UnknownDtype(u8),
    #[error("truncated {section}: expected {expected} bytes, found {found}")]
    Truncated {
        section: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("malformed metadata in {path}: {detail}")]
    Metadata { path: PathBuf, detail: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("training diverged at epoch {epoch}: {detail}")]
    TrainingFailure { epoch: usize, detail: String },
    #[error("learning-rate search failed: every grid point diverged ({0})")]
    SearchFailure(String),
    #[error("arm {setting} failed: {source}")]
    ArmFailed {
        setting: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures raised by training itself (divergence, failed search),
    /// looking through arm wrappers.
    pub fn is_training_failure(&self) -> bool {
        match self {
            Error::TrainingFailure { .. } | Error::SearchFailure(_) => true,
            Error::ArmFailed { source, .. } => source.is_training_failure(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } | Error::Format(_) => true,
            Error::ArmFailed { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
