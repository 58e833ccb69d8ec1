//! One report per invocation, rendered as text, JSON or CSV.

use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Text,
    Json,
    Csv,
}

pub struct Report {
    pub command: &'static str,
    pub field: String,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub evidence: Value,
    /// Human-readable lines for text mode.
    pub lines: Vec<String>,
    /// Header and rows for CSV mode.
    pub table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    /// False when a checked identity failed.
    pub verified: bool,
}

impl Report {
    pub fn new(command: &'static str, field: String) -> Report {
        Report {
            command,
            field,
            inputs: Map::new(),
            result: Value::Null,
            evidence: Value::Null,
            lines: Vec::new(),
            table: None,
            verified: true,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Report {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn render(&self, mode: Mode) -> String {
        match mode {
            Mode::Text => {
                let mut out = self.lines.join("\n");
                out.push('\n');
                out
            }
            Mode::Json => {
                let doc = json!({
                    "command": self.command,
                    "field": self.field,
                    "inputs": self.inputs,
                    "result": self.result,
                    "evidence": self.evidence,
                });
                let mut out = serde_json::to_string_pretty(&doc).expect("serializable report");
                out.push('\n');
                out
            }
            Mode::Csv => {
                let (header, rows) = match &self.table {
                    Some((h, r)) => (h.clone(), r.clone()),
                    None => (vec!["result"], vec![vec![scalar(&self.result)]]),
                };
                let mut out = csv_line(header.iter().map(|s| s.to_string()));
                for row in rows {
                    out.push_str(&csv_line(row.into_iter()));
                }
                out
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_line(cells: impl Iterator<Item = String>) -> String {
    let cells: Vec<String> = cells
        .map(|c| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c
            }
        })
        .collect();
    let mut line = cells.join(",");
    line.push('\n');
    line
}
