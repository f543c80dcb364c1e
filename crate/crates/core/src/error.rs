//! Error types shared across the toolkit.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A line of an input file did not match its expected format.
    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    /// Cross-references between records are inconsistent (dangling ids,
    /// asymmetric links, cycles).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// An operation was asked for values outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A lemma or id is absent from the loaded database.
    #[error("not found: {0}")]
    NotFound(String),

    /// Invalid or incomplete configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input data cannot support the requested estimate.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(file: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
