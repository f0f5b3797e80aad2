use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the operation's domain (zero modulus, composite where a
    /// prime is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A result or intermediate does not fit the 64-bit integer range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Request exceeds a configured resource cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A mathematical claim that should hold was observed to fail.
    #[error("anomaly: {0}")]
    Anomaly(String),

    /// Internal loop bound exceeded. Indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
