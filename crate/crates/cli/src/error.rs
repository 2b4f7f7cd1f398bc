use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] campanato::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// 2 for validation failures, 3 when a numerical decision cannot be made.
    pub fn exit_code(&self) -> i32 {
        use campanato::Error as E;
        match self {
            CliError::Core(E::Indeterminate(_) | E::Numerical(_)) => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::Io { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
