use thiserror::Error;

/// Exit codes: validation failure, bad input, numerical failure.
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("csv {path}: {msg}")]
    Csv { path: String, msg: String },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] angelesco_core::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(angelesco_core::Error::InvalidInput(_)) => EXIT_INPUT,
            CliError::Core(_) => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }
}
