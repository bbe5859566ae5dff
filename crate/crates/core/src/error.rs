use std::path::PathBuf;

use thiserror::Error;

use crate::match_data::EventKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed match document; `offset` is the byte position reported by the parser.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("unknown champion {0:?}")]
    UnknownChampion(String),

    #[error("champion-role table: {0}")]
    RoleTable(String),

    #[error("{kind} event is missing payload field `{field}`")]
    MissingPayload { kind: EventKind, field: &'static str },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{0}")]
    Model(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("featurized record: {0}")]
    Record(String),

    #[error("evaluation: {0}")]
    Evaluation(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
