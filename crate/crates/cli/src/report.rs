//! Run reports and atomic artifact writes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use epsilon_core::kernel::Metrics;

/// What one command did. Maps keep keys sorted so output is stable.
#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub metrics_before: Option<Metrics>,
    pub metrics_after: Option<Metrics>,
    pub trace: Option<String>,
    pub certificate: Option<String>,
    pub values: BTreeMap<String, Value>,
    pub verdicts: BTreeMap<String, bool>,
    pub wall_ms: u64,
}

impl RunReport {
    pub fn input(&mut self, k: &str, v: String) {
        self.inputs.insert(k.into(), v);
    }

    pub fn output(&mut self, k: &str, v: String) {
        self.outputs.insert(k.into(), v);
    }

    pub fn value(&mut self, k: &str, v: impl Into<Value>) {
        self.values.insert(k.into(), v.into());
    }

    pub fn verdict(&mut self, k: &str, ok: bool) {
        self.verdicts.insert(k.into(), ok);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `key: value` lines with dotted keys, in a fixed order.
    pub fn to_text(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut out = String::new();
        flatten("", &v, &mut out);
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
