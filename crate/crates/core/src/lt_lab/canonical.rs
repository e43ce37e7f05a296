use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Deterministic JSON text: object keys sorted, floats printed with 17
/// significant digits (`{:.16e}`), integers verbatim, non-finite floats as
/// `null`, two-space indentation.
pub fn to_canonical_json<S: Serialize>(value: &S) -> Result<String, serde_json::Error> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// Lowercase hex SHA-256 of the canonical JSON of `value`.
pub fn canonical_hash<S: Serialize>(value: &S) -> Result<String, serde_json::Error> {
    let text = to_canonical_json(value)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                match n.as_f64() {
                    Some(x) if x.is_finite() => write!(out, "{x:.16e}").unwrap(),
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*key], level + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_fixed_floats() {
        let text = to_canonical_json(&json!({"b": 1.5, "a": [1, -2, 0.1], "c": {"y": null, "x": "q\""}})).unwrap();
        let expected = "{\n  \"a\": [\n    1,\n    -2,\n    1.0000000000000001e-1\n  ],\n  \"b\": 1.5000000000000000e0,\n  \"c\": {\n    \"x\": \"q\\\"\",\n    \"y\": null\n  }\n}\n";
        assert_eq!(text, expected);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"][2].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 5e-324, f64::MAX] {
            let text = to_canonical_json(&json!([x])).unwrap();
            let back: Vec<f64> = serde_json::from_str(&text).unwrap();
            assert_eq!(back[0], x);
        }
    }

    #[test]
    fn non_finite_becomes_null() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        assert_eq!(to_canonical_json(&S { x: f64::NAN }).unwrap(), "{\n  \"x\": null\n}\n");
    }

    #[test]
    fn hash_is_stable() {
        let a = canonical_hash(&json!({"a": 1, "b": 2.0})).unwrap();
        let b = canonical_hash(&json!({"b": 2.0, "a": 1})).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
    }
}
