use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KdnError {
    #[error(transparent)]
    Core(#[from] kdn_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed {kind} file: {msg}")]
    Format { kind: &'static str, msg: String },
    #[error("{0}")]
    Invalid(String),
}

impl KdnError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        KdnError::Invalid(msg.into())
    }

    pub(crate) fn format(kind: &'static str, msg: impl Into<String>) -> Self {
        KdnError::Format {
            kind,
            msg: msg.into(),
        }
    }

    /// Process exit status: 2 for bad input, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            KdnError::Core(_) | KdnError::Format { .. } | KdnError::Invalid(_) => 2,
            KdnError::Io(_) | KdnError::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, KdnError>;
