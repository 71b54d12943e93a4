//! Structured run reports.
//!
//! Every command-level verdict the engine emits is wrapped in a [`Report`]
//! carrying the command that produced it, a content hash of the model it
//! ran against, the named verdicts, and the witness or certificate payloads
//! needed to re-check them. Reports are deterministic given their inputs
//! and seed, and every rational inside them serializes as an exact `"p/q"`
//! string.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::models::Model;

/// The version stamped into every report.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Content hash of a model: sha256 over its canonical JSON encoding.
///
/// Two models fingerprint equally exactly when they serialize equally, so
/// a model that survives a JSON round trip keeps its fingerprint.
pub fn model_fingerprint(model: &Model) -> String {
    let canonical = serde_json::to_string(model).expect("models always serialize");
    fingerprint_bytes(canonical.as_bytes())
}

/// The same hash over raw bytes, for fingerprinting emitted JSON directly.
pub fn fingerprint_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(7 + 2 * digest.len());
    out.push_str("sha256:");
    for byte in digest {
        write!(out, "{byte:02x}").expect("writing to a String cannot fail");
    }
    out
}

/// One run's structured output.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    /// Echo of the command (or internal operation) that produced this.
    pub command: String,
    /// Content hash of the model the command ran against, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_fingerprint: Option<String>,
    /// The computed answers, by name.
    pub verdicts: BTreeMap<String, Value>,
    /// Counterexample payloads backing negative verdicts.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<String, Value>,
    /// Positive evidence: factorizations, generators, tallies.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub certificates: BTreeMap<String, Value>,
    /// The RNG seed, for commands that sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Version of the engine that produced the report.
    pub engine_version: String,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            model_fingerprint: None,
            verdicts: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            certificates: BTreeMap::new(),
            seed: None,
            engine_version: ENGINE_VERSION.to_owned(),
        }
    }

    /// A report bound to a model by content hash.
    pub fn for_model(command: impl Into<String>, model: &Model) -> Report {
        let mut report = Report::new(command);
        report.model_fingerprint = Some(model_fingerprint(model));
        report
    }

    pub fn with_seed(mut self, seed: u64) -> Report {
        self.seed = Some(seed);
        self
    }

    pub fn verdict(mut self, key: &str, value: impl Serialize) -> Report {
        self.verdicts.insert(key.to_owned(), to_value(value));
        self
    }

    pub fn witness(mut self, key: &str, value: impl Serialize) -> Report {
        self.witnesses.insert(key.to_owned(), to_value(value));
        self
    }

    pub fn certificate(mut self, key: &str, value: impl Serialize) -> Report {
        self.certificates.insert(key.to_owned(), to_value(value));
        self
    }

    /// Pretty JSON with a trailing newline, the default output format.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Aligned key/value text, one row per field.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![("command".to_owned(), self.command.clone())];
        if let Some(fp) = &self.model_fingerprint {
            rows.push(("model".to_owned(), fp.clone()));
        }
        rows.push(("engine".to_owned(), self.engine_version.clone()));
        if let Some(seed) = self.seed {
            rows.push(("seed".to_owned(), seed.to_string()));
        }
        for (key, value) in &self.verdicts {
            rows.push((format!("verdict {key}"), render(value)));
        }
        for (key, value) in &self.witnesses {
            rows.push((format!("witness {key}"), render(value)));
        }
        for (key, value) in &self.certificates {
            rows.push((format!("certificate {key}"), render(value)));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (key, value) in rows {
            let _ = writeln!(out, "{key:width$}  {value}");
        }
        out
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report payloads always serialize")
}

/// Strings print bare; everything else prints as compact JSON.
fn render(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => serde_json::to_string(other).expect("values re-serialize"),
    }
}
