use thiserror::Error;

/// Errors raised by model construction and by operations whose
/// preconditions are violated. Verification outcomes ("class is not
/// GKM", "cover is not adapted") are reports, not errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("operands live in different character groups")]
    AmbientMismatch,

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}")]
    Algebra(String),

    #[error("invalid model at {pointer}: {message}")]
    Model { pointer: String, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn model(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Model {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// Prefix the JSON pointer of a model error; other variants become
    /// model errors located at `prefix`.
    pub fn at(self, prefix: &str) -> Self {
        match self {
            Error::Model { pointer, message } => Error::Model {
                pointer: format!("{prefix}{pointer}"),
                message,
            },
            other => Error::Model {
                pointer: prefix.to_string(),
                message: other.to_string(),
            },
        }
    }
}
