use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),

    #[error(transparent)]
    Core(#[from] nlgeo_core::Error),

    #[error("validation failed: {0} check(s) did not pass")]
    Validation(usize),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot encode output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        use nlgeo_core::Error as E;
        match self {
            CliError::Argument(_) => 2,
            CliError::Core(E::NonPhysical(_) | E::InvalidProbability(_)) => 3,
            CliError::Core(E::NotConverged(_)) => 5,
            CliError::Core(_) => 2,
            CliError::Validation(_) => 4,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
