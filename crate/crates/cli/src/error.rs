use thiserror::Error;

/// Errors surfaced by the front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cbf_core::CbfError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("usage: {0}")]
    Usage(String),
}

impl CliError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        use cbf_core::CbfError as C;
        match self {
            CliError::Core(C::SizeLimit { .. }) => "size-limit",
            CliError::Core(C::Truncation { .. }) => "truncation-overflow",
            CliError::Core(C::Precondition(_)) => "precondition",
            CliError::Core(_) => "invalid-input",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
            CliError::Csv(_) => "csv",
            CliError::Usage(_) => "usage",
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
