use thiserror::Error;

/// Errors shared by every module of the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An elementary operation was evaluated outside its domain.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    /// An iterative or tolerance-gated computation did not meet its bound.
    #[error("{message} (residual {residual:.3e})")]
    Numeric { message: String, residual: f64 },

    #[error("structural error: {0}")]
    Structural(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
