use std::fmt;

use serde_json::json;

/// A failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unparseable or inconsistent flags.
    Usage(String),
    /// Input files or values the library rejects.
    Validation(String),
    /// A NaN in a result.
    Numerical(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }

    /// The single-line JSON written to stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "code": self.code(), "message": self.message() } })
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl From<xtree_core::Error> for CliError {
    fn from(e: xtree_core::Error) -> Self {
        match e {
            xtree_core::Error::NanScore(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Rejects NaN anywhere in `values`.
pub fn guard_nan(what: &str, values: &[f64]) -> CliResult<()> {
    match values.iter().position(|v| v.is_nan()) {
        Some(i) => Err(CliError::Numerical(format!("NaN in {what} at index {i}"))),
        None => Ok(()),
    }
}
