use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: no records")]
    NoRecords(PathBuf),

    #[error("duplicate key {0}")]
    Duplicate(String),

    #[error("record references unknown episode {0:?}")]
    DanglingEpisode(String),

    #[error("incomplete grid: {missing} of {expected} (system, episode) cells missing, first missing {first}")]
    IncompleteGrid {
        missing: usize,
        expected: usize,
        first: String,
    },

    #[error("unknown system {0:?}")]
    UnknownSystem(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("correlation undefined: {0}")]
    Undefined(String),

    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("empty selection: {0}")]
    EmptySelection(String),

    #[error("record {0} carries no grade")]
    Ungraded(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            return Error::MissingFile(path.into());
        }
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
