use thiserror::Error;

/// Failure modes shared by every module of the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument is outside its admissible range.
    #[error("invalid argument `{name}`: {reason}")]
    Argument { name: &'static str, reason: String },

    /// A model or discretization was configured inconsistently.
    #[error("configuration error: {0}")]
    Config(String),

    /// A parameter lies outside the mathematical domain of the construction.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to converge or produced non-finite values.
    #[error("numerical error: {0}")]
    Numeric(String),

    /// A computation would exceed its configured resource budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// Input data is degenerate for the requested estimate.
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Argument {
            name,
            reason: reason.into(),
        }
    }
}
