use thiserror::Error;

/// Errors produced while building distributions or evaluating divergences.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Distribution parameters violate an invariant.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A quantile or integrand evaluated to NaN or infinity.
    #[error("non-finite value at level {level}: {detail}")]
    NonFinite { level: f64, detail: String },

    /// A partial sum left the representable range.
    #[error("integral overflow: {0}")]
    Overflow(String),

    /// Input text could not be turned into a valid object.
    #[error("parse error at {path}: {reason}")]
    Parse { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that stem from malformed input rather than arithmetic.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::InvalidDistribution(_) | Error::Io(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
