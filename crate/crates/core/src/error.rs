use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero bytes moved at memory level {level}: arithmetic intensity is undefined")]
    DivisionByZero { level: String },

    #[error("missing {kind} ceiling for {what}")]
    MissingCeiling { kind: &'static str, what: String },

    #[error("malformed {input} input: {message}")]
    MalformedInput { input: String, message: String },

    #[error("no time basis: {0}")]
    MissingTimeBasis(String),

    #[error("unrecognized input format (candidates: {})", if candidates.is_empty() { "none".to_string() } else { candidates.join(", ") })]
    UnrecognizedFormat { candidates: Vec<String> },

    #[error("invalid configuration at {path}: {message}")]
    Config { path: String, message: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("benchmark failed: {0}")]
    Bench(String),

    #[error("cannot render report: {0}")]
    Report(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn malformed(input: impl Into<String>, message: impl Into<String>) -> Self {
        Error::MalformedInput {
            input: input.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
