use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("episode {subject}/{thread}: {message}")]
    Episode {
        subject: String,
        thread: String,
        message: String,
    },

    #[error("line {line}: unsupported ARFF feature: {feature}")]
    Unsupported { line: u64, feature: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("training data has too few classes: {0}")]
    TooFewClasses(String),

    #[error("non-finite feature value in attribute {0}")]
    NonFinite(String),

    #[error("invalid fold plan: k={k} for n={n} (need 2 <= k <= n)")]
    InvalidFolds { n: usize, k: usize },

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
