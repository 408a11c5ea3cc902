use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure in {context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: cifs_core::Error,
    },
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration and output problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }
}

/// Attaches a context label to core errors.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for cifs_core::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numeric { context: what.to_string(), source })
    }
}
