use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point has a non-finite coordinate")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arrival index {t} lies after the current time {now}")]
    FutureArrival { t: u64, now: u64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("stream exceeds the configured maximum length of {n_max} points")]
    StreamTooLong { n_max: u64 },

    #[error("aspect ratio bound violated: observed distance {observed} exceeds delta {bound} at arrival {arrival}")]
    AspectRatioViolated { observed: f64, bound: f64, arrival: u64 },

    #[error("exhaustive search needs {candidates} candidate sets, over the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
