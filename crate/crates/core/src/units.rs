//! Length values with explicit unit suffixes.
//!
//! Configuration files may give a length either as a bare number (meters) or
//! as a string such as `"500nm"`, `"20 um"`, `"0.1m"`. Everything inside the
//! crate is SI meters.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

const SUFFIXES: &[(&str, f64)] = &[
    ("nm", 1e-9),
    ("um", 1e-6),
    ("µm", 1e-6),
    ("mm", 1e-3),
    ("m", 1.0),
];

/// Parse a length such as `"500nm"` into meters.
pub fn parse_length(text: &str) -> Result<f64, String> {
    let trimmed = text.trim();
    // longest suffix first so "mm" is not read as "m"
    for (suffix, scale) in SUFFIXES {
        if let Some(number) = trimmed.strip_suffix(suffix) {
            let value: f64 = number
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse length `{text}`"))?;
            if !value.is_finite() {
                return Err(format!("length `{text}` is not finite"));
            }
            return Ok(value * scale);
        }
    }
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!(
            "cannot parse length `{text}` (expected a number in meters or a nm/um/mm/m suffix)"
        )),
    }
}

/// A length in meters that deserializes from a number or a suffixed string.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Length(pub f64);

impl Length {
    pub fn meters(self) -> f64 {
        self.0
    }
}

impl From<f64> for Length {
    fn from(v: f64) -> Self {
        Length(v)
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct LengthVisitor;

        impl Visitor<'_> for LengthVisitor {
            type Value = Length;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a length in meters or a string with a nm/um/mm/m suffix")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Length, E> {
                Ok(Length(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Length, E> {
                Ok(Length(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Length, E> {
                Ok(Length(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Length, E> {
                parse_length(v).map(Length).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(LengthVisitor)
    }
}
