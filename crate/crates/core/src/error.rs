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
    Parse { path: String, line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("duplicate source {kind} at token {token:?} in {doc_id}/{sent_id}")]
    DuplicateSource {
        doc_id: String,
        sent_id: String,
        kind: &'static str,
        token: Option<usize>,
    },

    #[error("token index {index} out of bounds for sentence of length {len} in {doc_id}/{sent_id}")]
    OutOfBounds {
        doc_id: String,
        sent_id: String,
        index: usize,
        len: usize,
    },

    #[error("no prediction for {doc_id}/{sent_id} source={source_key} event={event}")]
    MissingPrediction {
        doc_id: String,
        sent_id: String,
        source_key: String,
        event: usize,
    },

    #[error("remote transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: usize, message: String },

    #[error("remote returned HTTP {status}: {body}")]
    Http { status: u16, body: String },

    #[error("remote item {index} failed: {message}")]
    RemoteItem { index: usize, message: String },

    #[error("undefined: {0}")]
    Undefined(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    /// Process exit code for the command-line front end.
    ///
    /// 3 covers anything that touched the outside world (files, network);
    /// 4 covers bad data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Transport { .. } | Error::Http { .. } => 3,
            _ => 4,
        }
    }

    /// Short machine-readable category, used in JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::DuplicateSource { .. } => "duplicate_source",
            Error::OutOfBounds { .. } => "out_of_bounds",
            Error::MissingPrediction { .. } => "missing_prediction",
            Error::Transport { .. } => "transport",
            Error::Http { .. } => "http",
            Error::RemoteItem { .. } => "remote_item",
            Error::Undefined(_) => "undefined",
        }
    }
}
