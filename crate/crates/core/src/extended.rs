use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A real number or a signed infinity. Serializes finite values as JSON
/// numbers and infinities as the strings `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
            ExtendedReal::NegInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtendedReal::PosInfinity
        } else if v == f64::NEG_INFINITY {
            ExtendedReal::NegInfinity
        } else {
            ExtendedReal::Finite(v)
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => f.write_str("infinity"),
            ExtendedReal::NegInfinity => f.write_str("-infinity"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::PosInfinity => s.serialize_str("inf"),
            ExtendedReal::NegInfinity => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ExtendedReal;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtendedReal, E> {
                match v {
                    "inf" => Ok(ExtendedReal::PosInfinity),
                    "-inf" => Ok(ExtendedReal::NegInfinity),
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

    #[test]
    fn json_forms() {
        let xs = vec![
            ExtendedReal::Finite(0.5),
            ExtendedReal::PosInfinity,
            ExtendedReal::NegInfinity,
        ];
        let text = serde_json::to_string(&xs).unwrap();
        assert_eq!(text, r#"[0.5,"inf","-inf"]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, xs);
        assert_eq!(
            ExtendedReal::from_f64(f64::INFINITY),
            ExtendedReal::PosInfinity
        );
    }
}
