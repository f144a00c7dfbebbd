//! Fixed-precision output shared by every report and grid writer.

use serde_json::Value;

/// Significant digits used for all emitted numbers.
pub const SIG_DIGITS: usize = 6;

/// Rounds to `digits` significant digits. Non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest decimal text of `x` rounded to [`SIG_DIGITS`]; magnitudes
/// below 1e-4 or from 1e9 upwards use exponent notation.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x, SIG_DIGITS);
    let a = r.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e9).contains(&a) {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

/// Rounds every floating-point number in a JSON tree in place.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"), SIG_DIGITS);
            if let Some(num) = serde_json::Number::from_f64(r) {
                *n = num;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with all floats rounded, newline-terminated.
pub fn to_rounded_json<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(fmt_sig(0.015401536406), "0.0154015");
        assert_eq!(fmt_sig(0.80260633678), "0.802606");
        assert_eq!(fmt_sig(-113.2912), "-113.291");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(123456789.0), "123457000");
        assert_eq!(fmt_sig(2.5e-20), "2.5e-20");
        assert_eq!(fmt_sig(-8.066461e-17), "-8.06646e-17");
        assert_eq!(fmt_sig(1.234567e12), "1.23457e12");
        assert_eq!(fmt_sig(0.0001), "0.0001");
    }

    #[test]
    fn json_tree() {
        let mut v = serde_json::json!({"a": 0.123456789, "b": [1, 2.000000001], "c": "x"});
        round_json(&mut v);
        assert_eq!(
            v,
            serde_json::json!({"a": 0.123457, "b": [1, 2.0], "c": "x"})
        );
    }
}
