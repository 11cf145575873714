use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("node {0} out of range")]
    NodeOutOfRange(usize),

    #[error("community assignment: {0}")]
    Assignment(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hypervolume: {0}")]
    Hypervolume(String),

    #[error("analysis: {0}")]
    Analysis(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
