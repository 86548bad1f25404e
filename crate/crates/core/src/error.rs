use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid scenario, region or pipeline configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A query fell outside the domain covered by a field.
    #[error("domain error: {0}")]
    Domain(String),

    /// Factorization failed even after the maximum jitter.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An operation was called with inputs violating its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Some task cannot be reached from some depot.
    #[error("unreachable: {0}")]
    Unreachable(String),

    #[error("mission error: {0}")]
    Mission(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
