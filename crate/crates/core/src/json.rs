//! Serde helpers shared by the report types.
//!
//! Non-finite reals are written as the strings `"inf"`, `"-inf"` and `"nan"`
//! (JSON has no literal for them); complex vectors are written as
//! `{"re": [...], "im": [...]}` to match the operator and signal formats.

use serde::de::{Deserializer, Error as _};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::C64;

/// A real that may be infinite.
pub fn real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// An optional real that may be infinite.
pub fn opt_real<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => real(v, s),
        None => s.serialize_none(),
    }
}

/// Parse the string forms written by [`real`].
pub fn parse_real(v: &str) -> Option<f64> {
    match v {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => v.parse().ok(),
    }
}

struct CVecRef<'a>(&'a [C64]);

impl Serialize for CVecRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CVec", 2)?;
        st.serialize_field("re", &self.0.iter().map(|z| z.re).collect::<Vec<_>>())?;
        st.serialize_field("im", &self.0.iter().map(|z| z.im).collect::<Vec<_>>())?;
        st.end()
    }
}

/// A complex vector as `{"re", "im"}`.
pub fn cvec<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    CVecRef(v).serialize(s)
}

/// An optional complex vector as `{"re", "im"}` or `null`.
pub fn opt_cvec<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => CVecRef(v).serialize(s),
        None => s.serialize_none(),
    }
}

#[derive(Deserialize)]
struct CVecJson {
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

/// Read a complex vector written by [`cvec`]; `im` may be omitted.
pub fn de_cvec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
    let v = CVecJson::deserialize(d)?;
    if !v.im.is_empty() && v.im.len() != v.re.len() {
        return Err(D::Error::custom("re and im lengths differ"));
    }
    Ok(v.re.iter().enumerate().map(|(i, &r)| C64::new(r, v.im.get(i).copied().unwrap_or(0.0))).collect())
}
