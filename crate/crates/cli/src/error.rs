use quad_eit_core::CoreError;

/// Anything a command can fail with, tagged with the process exit code the
/// binary reports. Config and domain problems are usage errors (2); the
/// numeric failure modes keep distinct codes so scripts can tell a
/// non-converging solve (3) from a broken result (4).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(CoreError::Domain(_)) => 2,
            CliError::Core(CoreError::Convergence(_)) => 3,
            CliError::Core(CoreError::Numerical(_)) => 4,
        }
    }
}
