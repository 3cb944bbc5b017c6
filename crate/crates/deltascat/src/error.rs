use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("z is numerically exceptional: |det Γ(z)| = {det:e}")]
    Exceptional { det: f64 },
    #[error("ladder breakdown at {display}: {reason}")]
    Ladder { display: String, reason: String },
    #[error("fit failure: {0}")]
    Fit(String),
    #[error("under-resolved quadrature: {0}")]
    Resolution(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Domain(_) | Error::Precondition(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
