//! Canonical output: JSON with sorted keys and reals at 17 significant
//! digits, and plot-ready CSV for estimator curves. Identical inputs give
//! byte-identical text.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::estimate::DimensionEstimate;

/// `%.17g`: enough digits to round-trip every `f64`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => write!(out, "{i}").expect("string write"),
            (_, Some(u), _) => write!(out, "{u}").expect("string write"),
            (_, _, Some(f)) => out.push_str(&format_g17(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encodes")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            // Arrays of scalars stay on one line.
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (k, x) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write_value(out, x, indent + 1);
                    out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key encodes"));
                out.push_str(": ");
                write_value(out, &map[*key], indent + 1);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Canonical JSON text of an already-built value, newline terminated.
pub fn canonical_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

/// Canonical JSON text of any serializable value.
pub fn to_canonical(value: &impl Serialize) -> serde_json::Result<String> {
    Ok(canonical_value(&serde_json::to_value(value)?))
}

/// Column names and abscissa for a curve, chosen by the estimate's
/// `quantity` parameter.
fn curve_columns(est: &DimensionEstimate) -> (&'static str, &'static str, bool) {
    match est.params.get("quantity").and_then(Value::as_str) {
        Some("entropy_dimension") => ("n", "entropy_ratio", false),
        Some("beurling_dimension") => ("log_h", "log_count", true),
        Some("fourier_dimension") => ("log_xi", "log_envelope", true),
        Some("lev_exponent") => ("log_r", "log_integral", true),
        _ => ("log_scale", "statistic", true),
    }
}

/// CSV of an estimator curve: `(n, H_n/(n log₂ b))` for entropy,
/// `(ln scale, statistic)` otherwise.
pub fn curve_csv(est: &DimensionEstimate) -> String {
    let (xname, yname, log_x) = curve_columns(est);
    let mut out = format!("{xname},{yname}\n");
    for c in &est.curve {
        let x = if log_x {
            format_g17(c.scale.ln())
        } else {
            c.index.to_string()
        };
        writeln!(out, "{x},{}", format_g17(c.statistic)).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn g17_formatting() {
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(123456.0), "123456");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -1e-300, 0.124875] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn keys_sorted_and_stable() {
        let v = json!({"b": 1, "a": [0.5, 2], "c": {"z": null, "y": true}});
        let s = canonical_value(&v);
        assert_eq!(s, "{\n  \"a\": [0.5, 2],\n  \"b\": 1,\n  \"c\": {\n    \"y\": true,\n    \"z\": null\n  }\n}\n");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
