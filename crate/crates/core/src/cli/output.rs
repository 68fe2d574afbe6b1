//! Report rendering: JSON with 17 significant digits, CSV with 12.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// Rewrites every non-integer number in `value` as `d.dddddddddddddddde±x`.
pub fn fix_precision(value: Value) -> Value {
    match value {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => match n.as_f64() {
            Some(f) if f.is_finite() => Number::from_str(&format!("{f:.16e}"))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            _ => Value::Null,
        },
        Value::Array(items) => Value::Array(items.into_iter().map(fix_precision).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, fix_precision(v))).collect()),
        other => other,
    }
}

pub fn to_json(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&fix_precision(value)).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::Number(n) => n.as_f64().map_or_else(String::new, |f| format!("{f:.11e}")),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One CSV row per object in `rows`, columns in the given order.
pub fn csv_table(columns: &[&str], rows: &[Value]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = columns.iter().map(|c| csv_cell(&row[*c])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn flatten_into(prefix: &str, value: &Value, out: &mut Vec<Value>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_into(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(&format!("{prefix}.{i}"), v, out);
            }
        }
        leaf => {
            let mut row = Map::new();
            row.insert("key".into(), Value::String(prefix.to_string()));
            row.insert("value".into(), leaf.clone());
            out.push(Value::Object(row));
        }
    }
}

/// `key,value` rows with dotted keys for nested fields.
pub fn csv_record(value: &Value) -> String {
    let mut rows = Vec::new();
    flatten_into("", value, &mut rows);
    csv_table(&["key", "value"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seventeen_digits_and_integers_untouched() {
        let v = fix_precision(json!({"a": 0.1, "n": 3, "x": [1.0, f64::NAN]}));
        assert_eq!(v["a"].to_string(), "1.0000000000000001e-1");
        assert_eq!(v["n"].to_string(), "3");
        assert_eq!(v["x"][0].to_string(), "1.0000000000000000e+0");
        assert!(v["x"][1].is_null());
        let back: f64 = v["a"].as_f64().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn csv_cells() {
        let rows = vec![json!({"x": 0.5, "name": "a,b", "r": null})];
        assert_eq!(
            csv_table(&["x", "name", "r"], &rows),
            "x,name,r\n5.00000000000e-1,\"a,b\",\n"
        );
        assert_eq!(csv_record(&json!({"p": {"k": 2}})), "key,value\np.k,2\n");
    }
}
