use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the corpus, tokenizer, perturbation, language-model and
/// evaluation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alignment error in {context}: {detail}")]
    Alignment { context: String, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("recovery is not supported for {0}")]
    UnsupportedRecovery(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error("classification error: {0}")]
    Classification(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl std::fmt::Display, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}
