//! Serialization of run results to CSV and JSON.

use serde_json::Value;

use crate::dynamics::fmt_num;

/// `# key: value` lines.
pub fn comment_block(entries: &[(&str, String)]) -> String {
    entries
        .iter()
        .map(|(k, v)| format!("# {k}: {v}\n"))
        .collect()
}

fn scalar(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_num(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(";"),
        Value::Object(_) => value.to_string(),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// One header row and one value row from a JSON object; nested objects become
/// dotted column names and arrays are `;`-joined.
pub fn record_csv(value: &Value) -> String {
    let mut cells = Vec::new();
    flatten("", value, &mut cells);
    let header: Vec<&str> = cells.iter().map(|(k, _)| k.as_str()).collect();
    let row: Vec<&str> = cells.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

/// Rows of `tau,value` pairs under a `label` column.
pub fn labelled_points_csv(rows: &[(&str, f64, f64)]) -> String {
    let mut out = String::from("kind,tau,value\n");
    for (label, tau, value) in rows {
        out.push_str(&format!("{label},{},{}\n", fmt_num(*tau), fmt_num(*value)));
    }
    out
}
