//! JSON output dialect shared by reports and certificates.
//!
//! Keys follow struct field order, floats are written with 17 significant
//! digits, and non-finite values (only ever `+inf` for an unattainable
//! constant) are written as the strings `"inf"`, `"-inf"` or `"nan"`.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Relative tolerance used when a computed inequality is compared against
/// its bound. Both the pipeline and the auditor use this value.
pub const INEQUALITY_TOLERANCE: f64 = 1e-10;

/// `lhs <= rhs` up to [`INEQUALITY_TOLERANCE`] relative to the larger magnitude.
pub fn within(lhs: f64, rhs: f64) -> bool {
    if lhs <= rhs {
        return true;
    }
    if !lhs.is_finite() || !rhs.is_finite() {
        return false;
    }
    lhs - rhs <= INEQUALITY_TOLERANCE * lhs.abs().max(rhs.abs())
}

/// Ratio with the conventions `0/0 = 0` and `t/0 = inf` for `t > 0`.
pub fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

#[derive(Clone, Copy, Default)]
struct DecimalFormatter;

impl Formatter for DecimalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` in the report dialect, terminated by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, DecimalFormatter);
    value
        .serialize(&mut ser)
        .expect("report types always serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Serde adapter for floats that may be infinite.
pub mod extended_f64 {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_nan() {
            s.serialize_str("nan")
        } else if *value == f64::INFINITY {
            s.serialize_str("inf")
        } else if *value == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, serde::Deserialize, Debug, PartialEq)]
    struct Row {
        a: f64,
        #[serde(with = "extended_f64")]
        b: f64,
    }

    #[test]
    fn seventeen_significant_digits_round_trip() {
        let row = Row {
            a: 0.1 + 0.2,
            b: f64::INFINITY,
        };
        let text = to_json(&row);
        assert_eq!(text, "{\"a\":3.0000000000000004e-1,\"b\":\"inf\"}\n");
        let back: Row = serde_json::from_str(&text).unwrap();
        assert_eq!(back, row);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(3.0, 2.0), 1.5);
    }

    #[test]
    fn within_is_relative() {
        assert!(within(1.0 + 1e-12, 1.0));
        assert!(!within(1.0 + 1e-6, 1.0));
        assert!(!within(f64::INFINITY, 1.0));
        assert!(within(0.0, 0.0));
    }
}
