//! Deterministic serialization: JSON with sorted keys and 17 significant
//! digits, CSV with shortest round-trip floats.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

/// Renders `value` as indented JSON. Object keys come out sorted because
/// `serde_json::Map` is ordered; every float is written as `{:.16e}`.
pub fn to_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                let _ = write!(out, "{x:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (k, v) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, v, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, v) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, v, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => write_object(out, map, depth),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, depth: usize) {
    if map.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    for (k, key) in keys.iter().enumerate() {
        indent(out, depth + 1);
        out.push_str(&Value::String((*key).clone()).to_string());
        out.push_str(": ");
        write_value(out, &map[*key], depth + 1);
        out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
    }
    indent(out, depth);
    out.push('}');
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// A float for a report; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

/// A table of floats with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let text = self.render().map_err(std::io::Error::other)?;
        std::fs::write(path, text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits_and_keys_sort() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": {"z": true, "y": null}});
        let s = to_json(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [1, 2.5000000000000000e0],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  }\n}\n"
        );
    }

    #[test]
    fn csv_uses_shortest_round_trip() {
        let mut t = CsvTable::new(["t", "x"]);
        t.rows.push(vec![0.1, 1.0 / 3.0]);
        assert_eq!(t.render().unwrap(), "t,x\n0.1,0.3333333333333333\n");
    }

    #[test]
    fn non_finite_is_null() {
        assert_eq!(num(f64::NAN), Value::Null);
    }
}
