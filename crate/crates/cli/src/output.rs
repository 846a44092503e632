use std::time::Duration;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Turns a serialized argument struct into flat string-valued parameters.
/// Nested argument groups are merged into the top level and unset options dropped.
pub fn params(args: &impl Serialize) -> Value {
    let mut out = Map::new();
    if let Ok(v) = serde_json::to_value(args) {
        merge_params(v, &mut out);
    }
    Value::Object(out)
}

fn merge_params(v: Value, out: &mut Map<String, Value>) {
    if let Value::Object(map) = v {
        for (k, v) in map {
            match v {
                Value::Null => {}
                Value::Object(_) => merge_params(v, out),
                other => {
                    out.insert(k, stringify_numbers(other));
                }
            }
        }
    }
}

fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(items) => Value::Array(items.into_iter().map(stringify_numbers).collect()),
        other => other,
    }
}

pub fn envelope(command: &str, args: &impl Serialize, result: Value, elapsed: Duration) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("params".into(), params(args));
    m.insert("result".into(), result);
    m.insert("timing_ms".into(), Value::from(elapsed.as_millis() as u64));
    Value::Object(m)
}

/// `(path, value)` pairs for every scalar leaf, paths joined with `.`.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    flatten_into(v, String::new(), &mut rows);
    rows
}

fn flatten_into(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(v, join(k), rows);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                rows.push((path.clone(), String::new()));
            }
            for (i, v) in items.iter().enumerate() {
                flatten_into(v, join(&i.to_string()), rows);
            }
        }
        Value::String(s) => rows.push((path, s.clone())),
        Value::Null => rows.push((path, "null".into())),
        other => rows.push((path, other.to_string())),
    }
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in flatten(v) {
                w.write_record([k, v]).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        Format::Table => {
            let rows = flatten(v);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
        }
    }
}
