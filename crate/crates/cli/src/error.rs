use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit code of a successful command.
pub const EXIT_OK: i32 = 0;
/// Exit code for invalid configurations and inputs.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for a numerical invariant violated during a run.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code for I/O failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<catqubit::Error> for CliError {
    fn from(e: catqubit::Error) -> Self {
        match e {
            catqubit::Error::Io(io) => CliError::Io(io),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
