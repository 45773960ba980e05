//! JSON report assembly with fixed float precision.

use serde_json::{json, Map, Number, Value};
use sha2::{Digest, Sha256};

pub const DEFAULT_DIGITS: usize = 10;
pub const DIGITS_ENV: &str = "LOQC_REPORT_DIGITS";

/// Significant digits from `LOQC_REPORT_DIGITS`, falling back to the default when the
/// variable is unset or not in `1..=17`.
pub fn digits_from_env() -> usize {
    std::env::var(DIGITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|d| (1..=17).contains(d))
        .unwrap_or(DEFAULT_DIGITS)
}

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every non-integer number in the tree.
pub fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().unwrap_or(0.0), digits);
            *v = Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn metadata(command: &str, input: &[u8], digits: usize) -> Value {
    json!({
        "tool": "loqc",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "input_sha256": sha256_hex(input),
        "report_digits": digits,
        "mode_order": "occupations list mode 0 first, matching the leftmost ket slot",
    })
}

/// Appends `metadata`, rounds, and renders as indented JSON.
pub fn finish(mut body: Map<String, Value>, meta: Value, digits: usize) -> String {
    body.insert("metadata".into(), meta);
    let mut v = Value::Object(body);
    round_floats(&mut v, digits);
    let mut s = serde_json::to_string_pretty(&v).expect("a JSON tree always serializes");
    s.push('\n');
    s
}

/// `Display` for floats at the report precision.
pub fn fmt_num(x: f64, digits: usize) -> String {
    let r = round_significant(x, digits);
    if r != 0.0 && r.abs() < 1e-4 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}
