use std::fmt;
use std::process::ExitCode;

use revivalkit::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or a violated parameter constraint; exit code 2.
    Config(String),
    /// A numerical step failed; exit code 3.
    Numeric(String),
}

impl CliError {
    /// Constraint violations count as configuration errors, everything
    /// else as numerical failures.
    pub fn from_core(e: Error, context: &str) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            Error::Parameter(_) | Error::TimeScale { .. } | Error::NotCoprime { .. } | Error::Profile(_) => {
                CliError::Config(msg)
            }
            _ => CliError::Numeric(msg),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

pub fn io(context: &str, e: impl fmt::Display) -> CliError {
    CliError::Numeric(format!("{context}: {e}"))
}
