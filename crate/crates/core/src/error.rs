use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("hypothesis class is empty")]
    EmptyClass,
    #[error("no hypothesis is consistent with the data")]
    NoConsistentHypothesis,
    #[error("enumeration cap exceeded: {count} label vectors, cap {cap}")]
    EnumerationCapExceeded { count: u128, cap: u128 },
    #[error("retry cap exceeded after {0} attempts")]
    RetryCapExceeded(usize),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable integer code, shared with the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::Invalid(_) => 1,
            Error::Guard(_) => 2,
            Error::EmptyClass => 3,
            Error::NoConsistentHypothesis => 4,
            Error::EnumerationCapExceeded { .. } => 5,
            Error::RetryCapExceeded(_) => 6,
            Error::Json(_) => 7,
            Error::Io(_) => 8,
            Error::Csv(_) => 9,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
