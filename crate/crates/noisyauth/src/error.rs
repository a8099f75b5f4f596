use thiserror::Error;

/// Errors produced across the crate.
#[derive(Error, Debug)]
pub enum Error {
    /// An argument violates a precondition (bad probability, dimension
    /// mismatch, out-of-range symbol, infeasible construction, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An exact computation would exceed its configured enumeration or
    /// grid budget. The message names the budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// A config or channel document failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
