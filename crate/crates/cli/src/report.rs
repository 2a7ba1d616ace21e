//! JSON reports written to stdout.

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use hfk_core::{ClassifyError, FormatError, KnotError, SuiteFailure, SurgeryError};

#[derive(Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
    pub version: &'static str,
}

impl Report {
    pub fn new(command: Vec<String>, input_digest: Option<String>) -> Self {
        Self {
            command,
            input_digest,
            result: None,
            error: None,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports are plain JSON values");
        text.push('\n');
        text
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

/// A domain or usage failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub body: ErrorBody,
}

impl CliError {
    pub fn new(code: u8, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            body: ErrorBody {
                kind,
                message: message.into(),
                extra: Map::new(),
            },
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(2, "usage", message)
    }

    pub fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        Self::new(1, kind, message)
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("error payloads are plain JSON values");
        self.body.extra.insert(key.to_string(), value);
        self
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        let message = e.to_string();
        match e {
            FormatError::Parse(_) => CliError::domain("parse", message),
            FormatError::Schema(_) => CliError::domain("schema", message),
            FormatError::Validation(v) => CliError::domain("validation", message).with("violations", v),
        }
    }
}

impl From<KnotError> for CliError {
    fn from(e: KnotError) -> Self {
        let message = e.to_string();
        match e {
            KnotError::Invalid(v) => CliError::domain("validation", message).with("violations", v),
            KnotError::EmptyComplex | KnotError::NotRankOne(_) => CliError::domain("complex", message),
        }
    }
}

impl From<SurgeryError> for CliError {
    fn from(e: SurgeryError) -> Self {
        CliError::domain("surgery", e.to_string())
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        CliError::domain("classify", e.to_string())
    }
}

impl From<Box<SuiteFailure>> for CliError {
    fn from(e: Box<SuiteFailure>) -> Self {
        let message = e.to_string();
        CliError::domain("suite_failure", message).with("failure", e)
    }
}

/// Table with integer keys rendered as strings, in numeric order.
pub fn table<K: ToString, V: Serialize>(entries: impl IntoIterator<Item = (K, V)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}
