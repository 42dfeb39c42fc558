use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    NotFound(PathBuf),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unreadable image {}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("label {id} at (row {row}, col {col}) is not in the taxonomy")]
    Taxonomy { id: u32, row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mask selects no pixels")]
    EmptyRegion,

    #[error("no window meets the inclusion threshold")]
    NoValidWindows,

    #[error("perceptual backend: {0}")]
    Backend(String),

    #[error("sequence: {0}")]
    Sequence(String),

    #[error("no loadable samples under {}", .0.display())]
    EmptyDataset(PathBuf),

    #[error("sample {sample_id} failed in strict mode: {reason}")]
    StrictSampleFailure { sample_id: String, reason: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// Process exit code used by the CLI: 1 usage/config, 2 dataset, 3 strict-mode failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 1,
            Error::StrictSampleFailure { .. } => 3,
            _ => 2,
        }
    }
}
