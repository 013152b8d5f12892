use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A series was asked to sum outside its region of convergence.
    #[error("domain error: {0}")]
    Domain(String),

    /// The generating series lacks nonnegative coefficients with A(1) > 0.
    #[error("positivity error: {0}")]
    Positivity(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Series did not reach its tolerance within the term budget.
    #[error("truncation limit reached after {terms} terms (tail bound {tail_bound:e})")]
    Truncation { terms: usize, tail_bound: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
