use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max |A - A*| = {drift:e})")]
    NotHermitian { drift: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid stack: {0}")]
    InvalidStack(String),

    #[error("{what} cap exceeded: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("family is not monotone on [{lo}, {hi}]: {detail}")]
    NonMonotone { lo: f64, hi: f64, detail: String },

    #[error("solver undecided: {0}")]
    Undecided(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
