//! Report serialization with 17 significant digits for every real.
//!
//! `serde_json` prints the shortest round-trip representation; here every
//! float goes through `{:.16e}` so equal values always print identically
//! and the digit count is fixed. Object keys come out sorted.

use serde::Serialize;
use serde_json::Value;

use crate::error::{invalid, Result};

/// `x` with 17 significant digits; non-finite values print as `null` in JSON
/// and as `NaN`/`inf`/`-inf` in CSV.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Compact JSON, one object per line.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| invalid(format!("serialization failed: {e}")))?;
    let mut out = String::new();
    write_value(&v, &mut out);
    Ok(out)
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().expect("serde_json numbers are i64, u64 or f64");
                if x.is_finite() {
                    out.push_str(&format_f64(x));
                } else {
                    out.push_str("null");
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        b: f64,
        a: u64,
        c: Vec<f64>,
        name: &'static str,
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(-2.0), "-2.0000000000000000e0");
        let s = format_f64(std::f64::consts::PI);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn json_sorted_and_parseable() {
        let s = to_json(&Sample { b: 1.5, a: 3, c: vec![0.25, f64::NAN], name: "x\"y" }).unwrap();
        assert_eq!(s, r#"{"a":3,"b":1.5000000000000000e0,"c":[2.5000000000000000e-1,null],"name":"x\"y"}"#);
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(1.5));
    }

    #[test]
    fn round_trip_is_exact() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, f64::MIN_POSITIVE] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
