//! Canonical result serialization: sorted keys, fixed float precision,
//! LF endings, trailing newline.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

/// Rounds to 15 significant digits so serialization is stable across
/// algorithmically equivalent runs.
pub fn canon_f64(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("canonical float round trip")
}

pub fn float(x: f64) -> Value {
    json!(canon_f64(x))
}

/// Exact integers; values beyond 64 bits fall back to decimal strings.
pub fn big(b: &BigInt) -> Value {
    match i64::try_from(b) {
        Ok(v) => json!(v),
        Err(_) => json!(b.to_string()),
    }
}

/// Wraps a verdict in the standard result envelope.
pub fn result_document(command: &str, verdict: Value, diagnostics: Value) -> Value {
    json!({
        "command": command,
        "schema_version": crate::doc::SCHEMA_VERSION,
        "verdict": verdict,
        "diagnostics": diagnostics,
    })
}

/// Canonical text form: serde_json Value maps iterate in sorted key
/// order, so pretty-printing the tree is already canonical.
pub fn render(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable value");
    out.push('\n');
    out
}

/// Converts any serializable payload into a sorted-key Value tree.
pub fn canonical<T: serde::Serialize>(payload: &T) -> Value {
    serde_json::to_value(payload).expect("serializable payload")
}

/// Sorted-key object from label/value pairs.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
