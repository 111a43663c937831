//! Exact rationals with the `{"num": str, "den": str}` JSON encoding.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Wire {
    num: String,
    den: String,
}

pub fn to_wire(r: &BigRational) -> serde_json::Value {
    serde_json::json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn from_biguint(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn zero() -> BigRational {
    BigRational::zero()
}

pub fn one() -> BigRational {
    BigRational::one()
}

/// Decimal rendering for reports only.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn display(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub mod serde_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        Wire { num: r.numer().to_string(), den: r.denom().to_string() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let w = Wire::deserialize(d)?;
        let num: BigInt = w.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = w.den.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(BigRational::new(num, den))
    }
}

pub mod serde_ratio_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let wires: Vec<Wire> =
            v.iter().map(|r| Wire { num: r.numer().to_string(), den: r.denom().to_string() }).collect();
        wires.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let wires = Vec::<Wire>::deserialize(d)?;
        wires
            .into_iter()
            .map(|w| {
                let num: BigInt = w.num.parse().map_err(serde::de::Error::custom)?;
                let den: BigInt = w.den.parse().map_err(serde::de::Error::custom)?;
                if den.is_zero() {
                    return Err(serde::de::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(num, den))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "serde_ratio")]
        x: BigRational,
    }

    #[test]
    fn wire_round_trip() {
        let h = Holder { x: ratio(6, -14) };
        let js = serde_json::to_string(&h).unwrap();
        assert_eq!(js, r#"{"x":{"num":"-3","den":"7"}}"#);
        let back: Holder = serde_json::from_str(&js).unwrap();
        assert_eq!(back, h);
        assert!(serde_json::from_str::<Holder>(r#"{"x":{"num":"1","den":"0"}}"#).is_err());
    }
}
