use thiserror::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Solver(#[from] plap_core::Error),

    #[error("{failed} of {total} rows failed")]
    RowsFailed { failed: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::Solver(e) if e.is_validation() => EXIT_USAGE,
            CliError::Solver(_) | CliError::RowsFailed { .. } => EXIT_SOLVER,
            CliError::Io(_) | CliError::Csv(_) => EXIT_IO,
        }
    }
}
