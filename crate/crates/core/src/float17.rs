//! Serde helpers writing `f64` values as JSON numbers with 17 significant
//! digits, which round-trips every finite double bit-exactly.

use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::{Error as _, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Scientific notation with 17 significant digits, e.g. `7.0000000000000000e-1`.
pub fn format(x: f64) -> String {
    format!("{x:.16e}")
}

fn number(x: f64) -> Result<serde_json::Number, String> {
    if !x.is_finite() {
        return Err(format!("cannot serialize non-finite value {x}"));
    }
    serde_json::Number::from_str(&format(x)).map_err(|e| e.to_string())
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    number(*x).map_err(S::Error::custom)?.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let n = serde_json::Number::deserialize(d)?;
    n.as_f64().ok_or_else(|| D::Error::custom("number out of range"))
}

pub mod list {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            seq.serialize_element(&number(x).map_err(S::Error::custom)?)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<serde_json::Number>::deserialize(d)?
            .into_iter()
            .map(|n| n.as_f64().ok_or_else(|| D::Error::custom("number out of range")))
            .collect()
    }
}

pub mod triples {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[[f64; 3]], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for p in xs {
            let triple = [number(p[0]), number(p[1]), number(p[2])];
            let triple: Result<Vec<_>, _> = triple.into_iter().collect();
            seq.serialize_element(&triple.map_err(S::Error::custom)?)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<[f64; 3]>, D::Error> {
        let raw = Vec::<[serde_json::Number; 3]>::deserialize(d)?;
        raw.into_iter()
            .map(|[x, y, z]| {
                let f = |n: serde_json::Number| {
                    n.as_f64().ok_or_else(|| D::Error::custom("number out of range"))
                };
                Ok([f(x)?, f(y)?, f(z)?])
            })
            .collect()
    }
}
