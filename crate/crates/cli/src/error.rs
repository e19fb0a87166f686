use std::path::PathBuf;

use qwalk_core::WalkError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}: {reason}")]
    ConfigFile { path: PathBuf, line: usize, reason: String },

    #[error("`{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Walk(#[from] WalkError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Input { path: PathBuf, reason: String },
}

impl CliError {
    pub fn config(key: &str, reason: impl Into<String>) -> Self {
        Self::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn input(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Self::Input {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Stable category name for the machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::ConfigFile { .. } | Self::Config { .. } => "config",
            Self::Walk(WalkError::HorizonAboveCap { .. }) => "horizon_above_cap",
            Self::Walk(_) => "parameter",
            Self::Io { .. } => "io",
            Self::Input { .. } => "input",
        }
    }

    /// Process exit status: 2 for problems with the invocation or
    /// configuration, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::ConfigFile { .. } | Self::Config { .. } | Self::Walk(_) => 2,
            Self::Io { .. } | Self::Input { .. } => 1,
        }
    }

    /// One-line JSON record, e.g. `{"error":{"kind":"config","message":"..."}}`.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
