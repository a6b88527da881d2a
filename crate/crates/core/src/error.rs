use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid weight: {0}")]
    Weight(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    /// Configuration-class errors map to 2, numerical ones to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_) | Error::Precondition(_) | Error::Weight(_) | Error::Resource(_) => 2,
            Error::Linalg(LinalgError::Precondition(_)) => 2,
            Error::Linalg(_) | Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
