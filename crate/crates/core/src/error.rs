use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single invalid field in an annotation payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid annotation: {}", join_fields(.0))]
    InvalidFields(Vec<FieldError>),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("stratification error: {0}")]
    Stratification(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("{kind} does not support {operation}")]
    Capability {
        kind: &'static str,
        operation: &'static str,
    },

    #[error("incompatible format: {0}")]
    Incompatible(String),

    #[error("session error: {0}")]
    State(String),

    #[error("index {index} out of range (dataset has {len} items)")]
    Range { index: usize, len: usize },

    #[error("translation provider error: {0}")]
    Provider(String),

    #[error("audit error: {0}")]
    Audit(String),
}

fn join_fields(fields: &[FieldError]) -> String {
    fields
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
