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

    #[error("source root does not exist: {0}")]
    RootNotFound(PathBuf),

    #[error("invalid rule pattern `{pattern}`: {source}")]
    Regex {
        pattern: String,
        #[source]
        source: regex::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed {format} input in {path}: {message}")]
    Format {
        format: &'static str,
        path: PathBuf,
        message: String,
    },

    #[error("method id not found in {side} snapshot: {id}")]
    UnresolvedId { side: &'static str, id: String },

    #[error(
        "{unresolved} of {total} reported pairs could not be bound to methods; \
         the report probably belongs to different snapshots"
    )]
    MostlyUnresolved { unresolved: usize, total: usize },

    #[error("embedding provider `{provider}` failed: {message}")]
    Embedding { provider: String, message: String },

    #[error("training set has no positive pairs")]
    NoPositives,

    #[error("pair sets differ between runs: {0}")]
    PairSetMismatch(String),

    #[error("invalid dataset row {row}: {message}")]
    Dataset { row: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(format: &'static str, path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            format,
            path: path.into(),
            message: message.to_string(),
        }
    }
}
