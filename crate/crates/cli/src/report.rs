//! Deterministic report emission.
//!
//! JSON objects use sorted keys and every float is rounded to 12
//! significant digits before serialization, so identical inputs and flags
//! give byte-identical files. CSV files carry a header row and use the same
//! rounding.

use std::path::Path;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// JSON number rounded to 12 significant digits; non-finite values are
/// `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(round12(x))
    } else {
        Value::Null
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn matrix(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| nums(r)).collect())
}

/// CSV cell for a float, with the report rounding.
pub fn csv_num(x: f64) -> String {
    if x.is_finite() {
        format!("{:?}", round12(x))
    } else {
        String::new()
    }
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut row = fields
        .into_iter()
        .map(|f| csv_field(f.as_ref()))
        .collect::<Vec<_>>()
        .join(",");
    row.push('\n');
    row
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `{"path": ..., "sha256": ...}` for an input file.
pub fn input_digest(path: &Path) -> CliResult<Value> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut m = Map::new();
    m.insert("path".into(), Value::from(path.display().to_string()));
    m.insert("sha256".into(), Value::from(sha256_hex(&bytes)));
    Ok(Value::Object(m))
}

/// Top-level report: command echo, input digests, results and warnings.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    arguments: Map<String, Value>,
    inputs: Map<String, Value>,
    results: Map<String, Value>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            arguments: Map::new(),
            inputs: Map::new(),
            results: Map::new(),
            warnings: Vec::new(),
        }
    }

    pub fn argument(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.arguments.insert(key.into(), value.into());
        self
    }

    pub fn input(&mut self, key: &str, path: &Path) -> CliResult<&mut Self> {
        self.inputs.insert(key.into(), input_digest(path)?);
        Ok(self)
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.into(), value.into());
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command.clone()));
        m.insert("arguments".into(), Value::Object(self.arguments.clone()));
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("results".into(), Value::Object(self.results.clone()));
        m.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().cloned().map(Value::from).collect()),
        );
        Value::Object(m)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
