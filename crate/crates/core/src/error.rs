use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    /// `column` is 1-based; a column one past the last character means
    /// unexpected end of input.
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },

    #[error("arity error at column {column}: {message}")]
    Arity { column: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite result: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("potential is not certified strictly convex: {0}")]
    Uncertified(String),

    #[error("operator is not homogeneous")]
    NonHomogeneous,

    #[error("rejected input: {0}")]
    Rejected(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
