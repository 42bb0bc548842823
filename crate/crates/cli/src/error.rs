use std::fmt;
use std::path::Path;

use serde::Serialize;

/// Failure class, mapped one-to-one onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Usage,
    Config,
    Data,
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage | ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numeric => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    /// Config field at fault, in dotted form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            field: None,
            message: message.into(),
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(ErrorKind::Data, format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        map.insert("error".into(), serde_json::to_value(self).expect("plain struct"));
        map.insert("exit_code".into(), self.exit_code().into());
        serde_json::Value::Object(map).to_string()
    }

    /// Model errors raised while validating the scenario are config errors.
    pub(crate) fn from_validation(err: satqkd_core::Error) -> Self {
        match err {
            satqkd_core::Error::InvalidParameter { field, reason } => Self::config(field, reason),
            other => Self::from(other),
        }
    }

    pub(crate) fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{:?} error in `{field}`: {}", self.kind, self.message),
            None => write!(f, "{:?} error: {}", self.kind, self.message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<satqkd_core::Error> for CliError {
    fn from(err: satqkd_core::Error) -> Self {
        let kind = if err.is_data_error() {
            ErrorKind::Data
        } else {
            ErrorKind::Numeric
        };
        Self::new(kind, err.to_string())
    }
}

pub(crate) fn missing_path(field: &str, path: &Path) -> CliError {
    CliError::new(
        ErrorKind::Data,
        format!("{field}: {} does not exist", path.display()),
    )
}

pub(crate) type Result<T> = std::result::Result<T, CliError>;
