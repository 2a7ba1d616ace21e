//! The JSON complex file:
//!
//! ```json
//! {"name": "unknot",
//!  "generators": [{"id": "x", "a": 0, "m": 0}],
//!  "differential": {},
//!  "duality": {"x": "x"}}
//! ```
//!
//! Unknown fields are rejected. Serialization emits generators in canonical
//! `(a, m, id)` order, so `parse ∘ serialize` is the identity.

use serde_json::error::Category;
use thiserror::Error;

use crate::knotcx::{KnotComplex, KnotError, RawComplex, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid complex: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<Violation>),
}

pub fn parse_raw(bytes: &[u8]) -> Result<RawComplex, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|e| FormatError::Parse(e.to_string()))?;
    serde_json::from_str(text).map_err(|e| match e.classify() {
        Category::Data => FormatError::Schema(e.to_string()),
        _ => FormatError::Parse(e.to_string()),
    })
}

pub fn parse(bytes: &[u8]) -> Result<KnotComplex, FormatError> {
    KnotComplex::try_from(parse_raw(bytes)?).map_err(|e| match e {
        KnotError::Invalid(v) => FormatError::Validation(v),
        other => FormatError::Schema(other.to_string()),
    })
}

pub fn serialize(b: &KnotComplex) -> String {
    let mut s = serde_json::to_string_pretty(&b.to_raw()).expect("complex files always serialize");
    s.push('\n');
    s
}
