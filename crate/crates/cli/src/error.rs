use std::path::PathBuf;

use nief_oracle::OracleError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config does not match the schema: {0}")]
    Schema(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] nief_core::Error),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Threads(String),
    #[error("{failed} selftest criteria failed")]
    SelftestFailed { failed: usize },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Read { .. } | RunError::Json(_) | RunError::Schema(_) | RunError::Config(_) => 2,
            RunError::Core(e) if e.is_validation() => 2,
            RunError::Oracle(OracleError::Input(_)) => 2,
            RunError::Core(_) | RunError::Oracle(_) => 3,
            RunError::Write { .. } | RunError::Threads(_) | RunError::SelftestFailed { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Read { .. } => "UnreadableConfig",
            RunError::Json(_) => "MalformedJson",
            RunError::Schema(_) => "SchemaError",
            RunError::Config(_) => "InvalidConfig",
            RunError::Core(e) => e.kind(),
            RunError::Oracle(e) => match e {
                OracleError::IllConditioned { .. } => "IllConditioned",
                OracleError::ResidualTooLarge { .. } => "ResidualTooLarge",
                OracleError::ToleranceNotMet { .. } => "ToleranceNotMet",
                OracleError::NonHalfInteger { .. } => "NonHalfInteger",
                OracleError::Input(_) => "InvalidInput",
            },
            RunError::Write { .. } => "WriteFailed",
            RunError::Threads(_) => "ThreadPool",
            RunError::SelftestFailed { .. } => "SelftestFailed",
        }
    }

    pub fn record(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": 1,
            "status": "error",
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}
