use std::process::ExitCode;

use hybridrt::config::ConfigError;
use hybridrt::estimate::EstimateError;
use hybridrt::hdr::io::HdrIoError;
use hybridrt::hdr::HdrError;
use hybridrt::sim::SimError;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or scene contents (exit 2).
    Config(String),
    /// Solver or numeric breakdown (exit 3).
    Numeric(String),
    /// Reading or writing files (exit 4).
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }

    /// Prints one JSON line on stderr and returns the exit status.
    pub fn report(&self, command: &str) -> ExitCode {
        let line = serde_json::json!({
            "error": self.kind(),
            "command": command,
            "code": self.code(),
            "message": self.message(),
        });
        eprintln!("{line}");
        ExitCode::from(self.code())
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } | ConfigError::Asset { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Unstable { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HdrError> for CliError {
    fn from(e: HdrError) -> Self {
        match e {
            HdrError::RankDeficient(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::Diverged { .. } => CliError::Numeric(e.to_string()),
            EstimateError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HdrIoError> for CliError {
    fn from(e: HdrIoError) -> Self {
        match e {
            HdrIoError::Bracket(b) => b.into(),
            HdrIoError::Manifest { .. } => CliError::Config(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}
