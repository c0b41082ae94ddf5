//! Error type shared across the crate.
//!
//! Errors split into two broad classes that the CLI maps onto exit codes:
//! mathematical failures (the data is well-formed but violates an axiom or a
//! precondition of the theory) and input failures (malformed files, unknown
//! specs, out-of-range parameters).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally malformed data: wrong shapes, missing unit row, bad schema.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// Arithmetic misuse inside the exact number tower.
    #[error("division by zero in cyclotomic arithmetic")]
    DivisionByZero,

    /// A mathematical check failed: the data is not what it claims to be.
    #[error("{0}")]
    Math(String),

    /// Exhaustive-search operation invoked beyond its stated bound.
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    /// A construction the crate deliberately refuses to approximate.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(String),
}

impl Error {
    pub fn math(msg: impl Into<String>) -> Self {
        Error::Math(msg.into())
    }

    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    /// Exit code contract: 1 for mathematical failure, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Math(_) | Error::DivisionByZero => 1,
            Error::Malformed(_)
            | Error::BoundExceeded(_)
            | Error::Unsupported(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
