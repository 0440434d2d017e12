use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input data.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The data carries no usable signal for the requested fit
    /// (e.g. fitting on a dataset with zero observed features).
    #[error("insufficient signal: {0}")]
    InsufficientSignal(String),

    /// A numeric routine failed to produce a finite, trustworthy result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An exact discrete-distribution query exceeded its truncation budget.
    /// Carries the number of terms accumulated and the cdf mass reached.
    #[error("truncation budget exceeded after {terms} terms (cdf mass {mass})")]
    TruncationBudget { terms: u64, mass: f64 },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// Short machine-readable tag, used for per-row status codes in reports.
    pub fn status_code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain-error",
            Error::Parse { .. } => "parse-error",
            Error::InsufficientSignal(_) => "insufficient-signal",
            Error::Numeric(_) => "numeric-error",
            Error::TruncationBudget { .. } => "truncation-budget",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
