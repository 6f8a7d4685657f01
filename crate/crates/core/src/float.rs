//! Serde adapters for reals that may be infinite.
//!
//! JSON has no infinity; `±∞` and NaN are written as the strings `"inf"`,
//! `"-inf"` and `"nan"`. Finite values round-trip exactly.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

struct ExtendedReal;

impl Visitor<'_> for ExtendedReal {
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

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(ExtendedReal)
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, Debug, PartialEq)]
    struct W {
        #[serde(with = "super")]
        x: f64,
    }

    #[test]
    fn round_trip() {
        for x in [0.1, -3.5e-300, f64::INFINITY, f64::NEG_INFINITY, 2.0] {
            let s = serde_json::to_string(&W { x }).unwrap();
            assert_eq!(serde_json::from_str::<W>(&s).unwrap(), W { x });
        }
        assert_eq!(serde_json::to_string(&W { x: f64::INFINITY }).unwrap(), r#"{"x":"inf"}"#);
    }
}
