use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    /// The config or a record could not be parsed or validated.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("missing input: {0}")]
    Missing(String),

    #[error(transparent)]
    Core(brlab::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl From<brlab::Error> for BenchError {
    fn from(e: brlab::Error) -> Self {
        match e {
            brlab::Error::Resource(m) => BenchError::Budget(m),
            other => BenchError::Core(other),
        }
    }
}

impl BenchError {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        BenchError::Parse { location: location.into(), message: message.into() }
    }

    /// Process exit code: 2 for parse errors and missing inputs, 3 for budget
    /// overruns, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Parse { .. } | BenchError::Missing(_) => 2,
            BenchError::Budget(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
