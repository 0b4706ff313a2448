//! Run reports: checks, results, provenance and fingerprint.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::{OutputFormat, RunConfig, SCHEMA_VERSION};

/// What a check's value is compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    AtMost { tolerance: f64 },
    Within { lower: f64, upper: f64 },
    Equals { expected: f64 },
    /// Passes when the computation finishes; the value is diagnostic.
    Completed,
    /// Reported without a pass/fail threshold.
    Informational,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value: Some(value),
            criterion: Criterion::AtMost { tolerance },
            note: None,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            passed: (lower..=upper).contains(&value),
            value: Some(value),
            criterion: Criterion::Within { lower, upper },
            note: None,
        }
    }

    pub fn equals(name: impl Into<String>, value: usize, expected: usize) -> Self {
        Self {
            name: name.into(),
            passed: value == expected,
            value: Some(value as f64),
            criterion: Criterion::Equals {
                expected: expected as f64,
            },
            note: None,
        }
    }

    pub fn completed(name: impl Into<String>, value: Option<f64>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            value,
            criterion: Criterion::Completed,
            note: None,
        }
    }

    pub fn informational(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            passed: true,
            value: Some(value),
            criterion: Criterion::Informational,
            note: None,
        }
    }

    /// A check that could not be evaluated because the computation failed.
    pub fn failed(name: impl Into<String>, error: &crate::Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            value: None,
            criterion: Criterion::Completed,
            note: Some(error.to_string()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: &'static str,
    pub version: &'static str,
}

pub const ARTIFACT: Artifact = Artifact {
    name: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub artifact: Artifact,
    pub command: String,
    pub config: RunConfig,
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// SHA-256 of the report with this field empty and timings removed.
    pub fingerprint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact: ARTIFACT,
            command: command.to_string(),
            config,
            results: BTreeMap::new(),
            checks: Vec::new(),
            passed: true,
            fingerprint: String::new(),
            timings: None,
        }
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results.insert(key.to_string(), v);
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Sets `passed` and the fingerprint.
    pub fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.passed);
        let timings = self.timings.take();
        self.fingerprint.clear();
        let bytes = serde_json::to_vec(self).expect("report serializes");
        let digest = Sha256::digest(&bytes);
        self.fingerprint = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.timings = timings;
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.render_csv(),
        }
    }

    /// One `path,value` row per leaf of the JSON document.
    fn render_csv(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut rows = Vec::new();
        flatten("", &value, &mut rows);
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["path", "value"]).expect("in-memory write");
        for (path, v) in rows {
            writer.write_record([path, v]).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}
