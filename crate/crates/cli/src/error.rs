use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("engine error: {0}")]
    Engine(#[from] surface_fidelity::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 1 usage, 2 engine or i/o, 3 validation failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Config { .. } => 1,
            Self::Engine(_) | Self::Io { .. } => 2,
            Self::Validation(_) => 3,
        }
    }
}
