//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Vector or matrix operands disagree in shape.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numeric argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is missing, unknown, or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Training diverged: the objective became NaN or infinite.
    #[error("non-finite loss at epoch {epoch}: {detail}")]
    NonFiniteLoss { epoch: usize, detail: String },

    /// An operation that needs a fitted model was called before training.
    #[error("model is not trained: {0}")]
    Untrained(String),

    /// A checkpoint or dataset on disk does not match what the caller expects.
    #[error("incompatible artifact: {0}")]
    Incompatible(String),

    /// Malformed file contents (CSV, JSON, checkpoint payload).
    #[error("format error in {path}: {detail}")]
    Format { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn json(path: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json { path: path.into(), source }
    }

    pub fn format(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Format { path: path.into(), detail: detail.into() }
    }
}
