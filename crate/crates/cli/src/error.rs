use std::path::PathBuf;

use subspace_rip::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const ASSERTION: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const MATH: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => exit::USAGE,
            CliError::Core(e) => match e.root() {
                CoreError::Config(_) => exit::USAGE,
                CoreError::Infeasible(_) | CoreError::SpectrumInfeasible { .. } => exit::INFEASIBLE,
                _ => exit::MATH,
            },
        }
    }

    /// Which check failed, for the error message.
    pub fn check_name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Core(e) => match e.root() {
                CoreError::RankDeficient { .. } => "RankDeficient",
                CoreError::AmbientMismatch { .. } => "AmbientMismatch",
                CoreError::DimensionOrder { .. } => "DimensionOrder",
                CoreError::RankCollapse { .. } => "RankCollapse",
                CoreError::Domain(_) => "DomainError",
                CoreError::MissingCosines => "MissingCosines",
                CoreError::SpectrumInfeasible { .. } => "SpectrumInfeasible",
                CoreError::Infeasible(_) => "Infeasible",
                CoreError::Config(_) => "ConfigError",
                CoreError::Trial { .. } => "Trial",
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_follow_the_error_class() {
        let trial = CoreError::Trial {
            index: 3,
            source: Box::new(CoreError::Infeasible("x".into())),
        };
        assert_eq!(CliError::Core(trial).exit_code(), exit::INFEASIBLE);
        let rank = CoreError::RankDeficient {
            smallest: 0.0,
            largest: 1.0,
        };
        assert_eq!(CliError::Core(rank).exit_code(), exit::MATH);
        assert_eq!(CliError::Core(CoreError::Config("c".into())).exit_code(), exit::USAGE);
        assert_eq!(CliError::Usage("u".into()).exit_code(), exit::USAGE);
    }
}
