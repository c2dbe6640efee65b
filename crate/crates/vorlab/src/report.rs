//! Serialization helpers: floats and complex values as decimal strings.

use crate::Complex64;
use serde::{Serialize, Serializer};

/// Shortest round-trip decimal rendering of a float.
pub fn dec(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Serialize)]
struct CStr {
    re: String,
    im: String,
}

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    CStr { re: dec(z.re), im: dec(z.im) }.serialize(s)
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&dec(*x))
}

pub fn ser_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let out: Vec<CStr> = v.iter().map(|z| CStr { re: dec(z.re), im: dec(z.im) }).collect();
    out.serialize(s)
}

/// Complex number wrapper that serializes as decimal strings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecComplex(pub Complex64);

impl Serialize for DecComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_complex(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_strings_round_trip() {
        for x in [0.1, -3.25e-17, 1.0 / 3.0, 6.02e23] {
            assert_eq!(dec(x).parse::<f64>().unwrap(), x);
        }
        let j = serde_json::to_string(&DecComplex(Complex64::new(1.5, -2.0))).unwrap();
        assert_eq!(j, r#"{"re":"1.5e0","im":"-2e0"}"#);
    }
}
