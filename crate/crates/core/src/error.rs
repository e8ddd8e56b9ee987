use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the core estimators and generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the operation's domain.
    Domain(String),
    /// Two grids (or a grid and an auxiliary field) disagree in shape.
    Shape {
        expected: usize,
        found: usize,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Shape { expected, found } => {
                write!(f, "shape mismatch: expected {expected} values, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
