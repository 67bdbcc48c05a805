use std::fmt;

use frontfix::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Solver(String),
    ToleranceNotMet(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Solver(_) => 3,
            CliError::ToleranceNotMet(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Solver(m) | CliError::ToleranceNotMet(m) => f.write_str(m),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e.root_cause() {
            Error::InvalidArgument(_) | Error::OutOfDomain { .. } => CliError::Invalid(e.to_string()),
            Error::ToleranceNotMet(_) => CliError::ToleranceNotMet(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
