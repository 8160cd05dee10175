use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid variant {word:?}: {reason}")]
    InvalidVariant { word: String, reason: String },

    #[error("duplicate variant {0}")]
    DuplicateVariant(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("embedding store format: {0}")]
    StoreFormat(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("screening budget of {0} exhausted")]
    BudgetExhausted(usize),

    #[error("variant {0} was already screened")]
    DuplicateScreen(String),

    #[error("kernel matrix not positive definite (jitter escalated to {jitter:e})")]
    NotPositiveDefinite { jitter: f64 },

    #[error("every candidate has already been screened")]
    SearchSpaceExhausted,

    #[error("variant {0} is not present in the embedding store")]
    MissingEmbedding(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for malformed or inconsistent input data, as opposed to runtime failures.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::InvalidVariant { .. }
                | Error::DuplicateVariant(_)
                | Error::StoreFormat(_)
                | Error::DimensionMismatch { .. }
                | Error::MissingEmbedding(_)
        )
    }
}
