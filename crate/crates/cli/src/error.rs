use std::path::PathBuf;

use thiserror::Error;

/// Failures surfaced by the command line, each tied to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("output: {0}")]
    Output(String),

    #[error("censoring budget exhausted: {0}")]
    Censored(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Library(#[from] mobwalk::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use mobwalk::Error as E;
        match self {
            CliError::Censored(_) => 2,
            CliError::Library(E::Censored(_) | E::ScanCap { .. }) => 2,
            CliError::CheckFailed(_) => 3,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::Censored("x".into()).exit_code(), 2);
        assert_eq!(CliError::CheckFailed("x".into()).exit_code(), 3);
        let scan = mobwalk::Error::ScanCap { site: 3, cap: 10 };
        assert_eq!(CliError::from(scan).exit_code(), 2);
        let bad = mobwalk::Error::InvalidParameter("p".into());
        assert_eq!(CliError::from(bad).exit_code(), 1);
    }
}
