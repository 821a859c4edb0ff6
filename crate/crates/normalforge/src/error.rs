use std::path::PathBuf;

/// Errors produced by the normalforge library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value violated an operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Inconsistent or missing configuration (camera parameters, shape
    /// parameters, method names).
    #[error("configuration error: {0}")]
    Config(String),

    /// A metric or aggregate was requested over an empty collection.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Malformed on-disk data. `offset` is the byte position at which
    /// decoding failed, when known.
    #[error("format error in {path:?} at byte {offset}: {message}")]
    Format {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    #[error("i/o error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
