//! JSON documents: layout, content hashes.
//!
//! Every artifact is a JSON object whose last field is
//! `"content_hash": "sha256:<hex>"`, the SHA-256 of the compact JSON of the
//! object without that field and with keys sorted at every level.
//!
//! Documents are written one key per line; arrays of scalars stay on one
//! line, so a GES array shows one tuple per line.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const HASH_FIELD: &str = "content_hash";

fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            Value::Object(keys.into_iter().map(|k| (k.clone(), canonical(&map[k]))).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

/// `sha256:<hex>` of the canonical compact serialization of `v`.
pub fn content_hash(v: &Value) -> String {
    let bytes = serde_json::to_vec(&canonical(v)).expect("JSON values always serialize");
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Appends the content hash to a document.
pub fn seal(mut map: Map<String, Value>) -> Value {
    map.remove(HASH_FIELD);
    let hash = content_hash(&Value::Object(map.clone()));
    map.insert(HASH_FIELD.into(), Value::String(hash));
    Value::Object(map)
}

/// `Some(true)` when the stored hash matches the content, `None` when absent.
pub fn check_hash(v: &Value) -> Option<bool> {
    let map = v.as_object()?;
    let stored = map.get(HASH_FIELD)?.as_str()?.to_string();
    let mut rest = map.clone();
    rest.remove(HASH_FIELD);
    Some(content_hash(&Value::Object(rest)) == stored)
}

pub fn hash_of(v: &Value) -> Option<&str> {
    v.get(HASH_FIELD)?.as_str()
}

/// Renders a document with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, level);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn layout() {
        let v = json!({"n": 3, "entries": [[0, 0], [1, 2]], "meta": {"b": [], "a": {}}});
        assert_eq!(
            render(&v),
            "{\n  \"n\": 3,\n  \"entries\": [\n    [0, 0],\n    [1, 2]\n  ],\n  \"meta\": {\n    \"b\": [],\n    \"a\": {}\n  }\n}\n"
        );
        let back: Value = serde_json::from_str(&render(&v)).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = json!({"x": 1, "y": {"p": [1, 2], "q": null}});
        let b = json!({"y": {"q": null, "p": [1, 2]}, "x": 1});
        assert_eq!(content_hash(&a), content_hash(&b));
        assert_ne!(content_hash(&a), content_hash(&json!({"x": 2})));
        let sealed = seal(a.as_object().unwrap().clone());
        assert_eq!(check_hash(&sealed), Some(true));
        let mut tampered = sealed.clone();
        tampered["x"] = json!(5);
        assert_eq!(check_hash(&tampered), Some(false));
        assert_eq!(check_hash(&json!({"x": 1})), None);
        assert_eq!(
            content_hash(&json!({})),
            "sha256:44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
    }
}
