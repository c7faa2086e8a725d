use thiserror::Error;

/// Errors produced by the lattice, density and torus routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("window exceeded: need radius {needed} but the set is only trusted up to {trusted}")]
    WindowExceeded { needed: f64, trusted: f64 },

    #[error("unsupported dimension {0} (only dimension 2 is supported here)")]
    UnsupportedDimension(usize),

    #[error("histogram box too small: {0}")]
    BoxTooSmall(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
