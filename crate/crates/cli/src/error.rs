use std::path::PathBuf;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// Some table rows missed their tolerance.
    pub const ROWS_FAILED: i32 = 1;
    pub const DEGENERATE: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const CANT_CREATE: i32 = 73;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Literal(#[from] crate::literal::LiteralError),
    #[error("{0}")]
    Degenerate(hyperspec::Error),
    #[error("solver failure: {0}")]
    Solver(hyperspec::Error),
    #[error("cannot read {}: {reason}", path.display())]
    Unreadable { path: PathBuf, reason: String },
    #[error("bad table data: {0}")]
    Data(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{failed} of {total} rows outside tolerance")]
    RowsFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Literal(_) => exit::USAGE,
            CliError::Degenerate(_) => exit::DEGENERATE,
            CliError::Solver(_) => exit::SOLVER,
            CliError::Unreadable { .. } => exit::NO_INPUT,
            CliError::Data(_) => exit::DATA,
            CliError::Output(_) => exit::CANT_CREATE,
            CliError::RowsFailed { .. } => exit::ROWS_FAILED,
        }
    }
}

impl From<hyperspec::Error> for CliError {
    fn from(e: hyperspec::Error) -> Self {
        match e {
            hyperspec::Error::Degenerate(_) => CliError::Degenerate(e),
            hyperspec::Error::InvalidArgument(msg) => CliError::Usage(msg),
            other => CliError::Solver(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
