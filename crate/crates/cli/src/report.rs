//! Reports: an ordered set of fields printed as plain lines or as one JSON
//! object carrying the same fields.

use std::io::Write;

use serde_json::{Map, Value};

/// Writes to stdout, ignoring a closed pipe (`bratteli ... | head`).
pub fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

#[derive(Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn print(&self, json: bool) {
        if json {
            let v = Value::Object(self.fields.clone());
            emit(&format!(
                "{}\n",
                serde_json::to_string_pretty(&v).expect("report serializes")
            ));
        } else {
            let mut out = String::new();
            for (k, v) in &self.fields {
                render(k, v, &mut out);
            }
            emit(&out);
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// One line per scalar; arrays give one line per element and objects inside
/// arrays collapse to `k=v` pairs on that line.
fn render(key: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                render(&format!("{key}.{k}"), v, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str(&format!("{key}: (none)\n"));
            }
            for item in items {
                out.push_str(&format!("{key}: {}\n", inline(item)));
            }
        }
        _ => out.push_str(&format!("{key}: {}\n", scalar(v))),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", inline(v)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        _ => scalar(v),
    }
}
