use std::io;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("line {line}: {message}")]
    ConfigLine { line: usize, message: String },
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Validation(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ConfigLine { .. } | CliError::Io(_) => EXIT_CONFIG,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<duplex_core::Error> for CliError {
    fn from(e: duplex_core::Error) -> Self {
        use duplex_core::Error as E;
        match e {
            E::DegenerateInput(_)
            | E::DegenerateSteadyState { .. }
            | E::NonConvergence { .. }
            | E::NumericalInstability { .. }
            | E::AmbiguousPeak(_) => CliError::Degenerate(e.to_string()),
            E::InvalidInput(_) | E::InvalidSpec(_) | E::UnsupportedRegime(_) | E::Config(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
