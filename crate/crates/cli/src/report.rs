//! JSON output helpers.
//!
//! Floats are printed as `d.16-digits e exp`, which is 17 significant
//! digits: parsing the text back yields the identical double, so reports
//! are loss-free and byte-stable across runs. Infinities (legal bound
//! values) cannot live in a JSON number, so they are encoded as the
//! strings `"inf"` and `"-inf"`.

use serde_json::ser::Formatter;
use serde_json::Value;
use std::io::{self, Write};
use varsep::polynomial::Point2;
use varsep::Complex64;

/// A float as a JSON value, with the infinity convention above.
pub fn number(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// A complex number as `[re, im]`.
pub fn complex(c: Complex64) -> Value {
    Value::Array(vec![number(c.re), number(c.im)])
}

/// A point as `[re_x, im_x, re_y, im_y]`, matching the `-p` flag.
pub fn point(p: Point2) -> Value {
    Value::Array(vec![
        number(p.x.re),
        number(p.x.im),
        number(p.y.re),
        number(p.y.im),
    ])
}

struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes a value on one line, newline-terminated, with exact floats
/// and keys in sorted order.
pub fn to_json(value: &Value) -> String {
    use serde::Serialize;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serialized JSON is UTF-8")
}

/// The same 17-digit convention for text-format reports.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip_through_text() {
        for v in [
            1.0,
            -0.1,
            std::f64::consts::PI,
            2.0_f64.sqrt(),
            1e-300,
            3.5e17,
        ] {
            let s = to_json(&number(v));
            let back: f64 = s.trim().parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }

    #[test]
    fn infinities_become_strings() {
        assert_eq!(to_json(&number(f64::INFINITY)), "\"inf\"\n");
        assert_eq!(to_json(&number(f64::NEG_INFINITY)), "\"-inf\"\n");
    }

    #[test]
    fn keys_are_sorted_and_stable() {
        let v = json!({"zeta": 1, "alpha": 2});
        assert_eq!(to_json(&v), "{\"alpha\":2,\"zeta\":1}\n");
    }

    #[test]
    fn point_layout_matches_flag_order() {
        let p = Point2::new(Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0));
        let v = point(p);
        let s = to_json(&v);
        assert_eq!(
            s,
            "[1.0000000000000000e0,2.0000000000000000e0,\
             3.0000000000000000e0,4.0000000000000000e0]\n"
        );
    }
}
