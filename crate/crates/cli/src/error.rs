use std::fmt;

use pie::{ErrorClass, PieError};

/// CLI failure, carrying its exit status class.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: missing files, malformed input, bad flags.
    Input(String),
    /// Exit 3: valid input with no mathematical answer.
    Degenerate(String),
    /// Exit 1: anything else, including failure to write results.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Input(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    /// Wraps a library error with context such as the offending path.
    pub fn from_pie(context: impl fmt::Display, err: PieError) -> Self {
        let msg = format!("{context}: {err}");
        match err.class() {
            ErrorClass::Input => CliError::Input(msg),
            ErrorClass::Degenerate => CliError::Degenerate(msg),
        }
    }
}

impl From<PieError> for CliError {
    fn from(err: PieError) -> Self {
        match err.class() {
            ErrorClass::Input => CliError::Input(err.to_string()),
            ErrorClass::Degenerate => CliError::Degenerate(err.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Degenerate(m) => write!(f, "degenerate input: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
