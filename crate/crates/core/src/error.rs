use thiserror::Error;

use crate::boolfn::VarId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A variable was queried outside an assignment's domain, or two
    /// operands disagree on their variable sets.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("variable {0:?} is not in the domain")]
    MissingVar(VarId),

    /// Exhaustive representation would exceed the configured variable cap.
    #[error("capacity exceeded: {needed} variables requested, cap is {cap}")]
    Capacity { needed: usize, cap: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("invalid tree decomposition: {0}")]
    Decomposition(String),

    #[error("invalid vtree: {0}")]
    Vtree(String),

    #[error("invalid compiled form: {0}")]
    Form(String),

    #[error("not a factor: {0}")]
    NotAFactor(String),

    #[error("invalid query or database: {0}")]
    Query(String),

    #[error("invalid parameters: {0}")]
    Params(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors caused by malformed textual input.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}
