//! CSV and JSON emission.
//!
//! CSV files open with `#` lines recording the resolved configuration,
//! then a header row. Floats use 17 significant digits in scientific
//! notation so that they round-trip exactly.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Resolved run parameters in the order they were recorded.
#[derive(Clone, Debug, Default)]
pub struct RunRecord {
    pub command: &'static str,
    pub entries: Vec<(String, String)>,
}

impl RunRecord {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.entries {
            match map.get_mut(k) {
                Some(Value::Array(a)) => a.push(Value::String(v.clone())),
                Some(prev) => {
                    let first = prev.take();
                    *prev = Value::Array(vec![first, Value::String(v.clone())]);
                }
                None => {
                    map.insert(k.clone(), Value::String(v.clone()));
                }
            }
        }
        Value::Object(map)
    }
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn render(&self, record: &RunRecord) -> String {
        let mut s = format!("# rmflab {}\n# command={}\n", env!("CARGO_PKG_VERSION"), record.command);
        for (k, v) in &record.entries {
            s.push_str(&format!("# {k}={v}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// The summary document: command, version, resolved config and the
/// command's result.
pub fn summary(record: &RunRecord, result: Value) -> Value {
    serde_json::json!({
        "command": record.command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": record.to_json(),
        "result": result,
    })
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Empirical quantiles with linear interpolation between order statistics.
pub fn quantiles(xs: &[f64], probs: &[f64]) -> Vec<(f64, f64)> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    probs
        .iter()
        .map(|&p| {
            if v.is_empty() {
                return (p, f64::NAN);
            }
            let pos = p * (v.len() - 1) as f64;
            let (lo, frac) = (pos.floor() as usize, pos.fract());
            let hi = (lo + 1).min(v.len() - 1);
            (p, v[lo] + frac * (v[hi] - v[lo]))
        })
        .collect()
}

pub fn quantiles_json(xs: &[f64]) -> Value {
    Value::Array(
        quantiles(xs, &[0.05, 0.25, 0.5, 0.75, 0.95])
            .into_iter()
            .map(|(p, q)| serde_json::json!({ "p": p, "value": q }))
            .collect(),
    )
}
