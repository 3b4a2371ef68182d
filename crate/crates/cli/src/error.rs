use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[source] serde_json::Error),

    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error(transparent)]
    Core(#[from] acsim_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn invalid(field: &str, message: String) -> Self {
        CliError::Invalid {
            field: field.to_string(),
            message,
        }
    }
}
