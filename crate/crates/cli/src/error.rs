use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or experiment parameters.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("output error: {0}")]
    Output(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Output(_) => 4,
            CliError::Compute(_) => 1,
        })
    }
}

impl From<qclab::Error> for CliError {
    fn from(e: qclab::Error) -> Self {
        use qclab::Error as E;
        match e {
            // parameter values the algorithms refuse
            E::OutOfRange(_) | E::NoClosedForm(_) | E::Parse(_) | E::NotPowerOfTwo(_) | E::InvalidWires(_) => {
                CliError::Config(e.to_string())
            }
            E::Io(m) => CliError::Output(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
