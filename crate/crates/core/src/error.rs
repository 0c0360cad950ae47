use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configured input column does not exist.
    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown activity `{0}`")]
    UnknownActivity(String),

    #[error("contract violation: {0}")]
    Contract(String),

    /// A bounded enumeration exceeded its configured limit.
    #[error("not computable at this scale: {0}")]
    TooLarge(String),

    #[error("recursion depth guard exceeded at depth {0}")]
    DepthExceeded(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
