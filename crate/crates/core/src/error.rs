use thiserror::Error;

/// Every failure the engine can report.
///
/// The variants are grouped by how a caller is expected to react: input
/// problems (`Dimension`, `Validation`, `Parse`, `Precondition`,
/// `InvalidCertificate`, `Unsupported`, `Range`), a `Precision` failure that
/// asks for a tighter decimal, and `NotFound` for an exhausted search.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("no certificate found: {0}")]
    NotFound(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precision(_) => 3,
            Error::NotFound(_) => 1,
            _ => 2,
        }
    }
}
