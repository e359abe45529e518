//! CLI error type with a fixed exit-code contract.

use std::fmt;

/// A fatal subcommand failure. The variant decides the process exit code:
///
/// * `Config` → 1: a configuration field is invalid or points nowhere.
/// * `MissingArtifact` → 2: an upstream pipeline artifact has not been
///   produced yet.
/// * `Internal` → 3: inputs exist but break a pipeline invariant, or an
///   unexpected I/O failure occurred.
#[derive(Debug)]
pub enum CliError {
    Config {
        field: &'static str,
        message: String,
    },
    MissingArtifact {
        name: &'static str,
        producer: &'static str,
    },
    Internal(String),
}

impl CliError {
    pub fn config(field: &'static str, message: impl fmt::Display) -> Self {
        CliError::Config {
            field,
            message: message.to_string(),
        }
    }

    pub fn internal(message: impl fmt::Display) -> Self {
        CliError::Internal(message.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 1,
            CliError::MissingArtifact { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => {
                write!(f, "invalid config field `{field}`: {message}")
            }
            CliError::MissingArtifact { name, producer } => {
                write!(
                    f,
                    "missing upstream artifact `{name}`; run `mediatrend {producer}` first"
                )
            }
            CliError::Internal(message) => f.write_str(message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Internal(format!("i/o failure: {err}"))
    }
}
