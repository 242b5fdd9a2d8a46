use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

use qht_core::{Error as CoreError, ValidationReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("invalid system: {0}")]
    Validation(ValidationReport),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 = bad input, 3 = runtime failure, 4 = the state stopped being physical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Usage(_) => 2,
            CliError::Core(CoreError::InvalidSpec(_) | CoreError::UnknownParameter(_)) => 2,
            CliError::Core(CoreError::PhysicalityLost { .. }) => 4,
            _ => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "validation",
            4 => "physicality",
            _ => "runtime",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        let report = match self {
            CliError::Validation(r) | CliError::Core(CoreError::InvalidSpec(r)) => Some(r),
            _ => None,
        };
        if let Some(r) = report {
            v["violations"] = serde_json::to_value(&r.violations).unwrap_or_default();
        }
        match self {
            CliError::Parse { line, column, .. } => {
                v["line"] = json!(line);
                v["column"] = json!(column);
            }
            CliError::Core(CoreError::PhysicalityLost { time, .. }) => v["time"] = json!(time),
            _ => {}
        }
        v
    }
}
