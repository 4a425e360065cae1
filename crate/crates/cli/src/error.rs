use std::path::PathBuf;

use capflow::FlowError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("csv output to {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("plot {path}: {reason}")]
    Plot { path: PathBuf, reason: String },

    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => 2,
            CliError::Flow(FlowError::Config { .. }) => 2,
            _ => 1,
        }
    }

    pub fn write(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Write { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_problems_map_to_two() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Flow(FlowError::config("theta", "bad")).exit_code(), 2);
        let io = std::io::Error::other("disk");
        assert_eq!(CliError::write("a", io).exit_code(), 1);
    }
}
