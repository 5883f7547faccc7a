//! Exact rational helpers shared by every solver.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Nearest `f64`. Falls back to a digit-wise division for huge numerators
/// and denominators that overflow the direct conversion.
pub fn to_f64(value: &Rational) -> f64 {
    if let Some(f) = value.to_f64() {
        if f.is_finite() {
            return f;
        }
    }
    let shift = value.numer().bits().max(value.denom().bits()) as i64 - 60;
    if shift <= 0 {
        return f64::NAN;
    }
    let num = value.numer() >> shift as usize;
    let den = value.denom() >> shift as usize;
    num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN)
}

/// Renders `p/q`, or just `p` for integers.
pub fn fraction_string(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn parse_fraction(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

/// Wire form of a probability: exact fraction plus a decimal approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prob {
    pub fraction: String,
    pub decimal: f64,
}

impl From<&Rational> for Prob {
    fn from(value: &Rational) -> Self {
        Prob {
            fraction: fraction_string(value),
            decimal: to_f64(value),
        }
    }
}

impl Prob {
    pub fn exact(&self) -> Option<Rational> {
        parse_fraction(&self.fraction)
    }
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
pub mod serde_fraction {
    use super::{fraction_string, parse_fraction, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fraction_string(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_fraction(&text).ok_or_else(|| D::Error::custom(format!("bad fraction `{text}`")))
    }
}

/// Serde adapter writing a [`Rational`] in [`Prob`] form.
pub mod serde_prob {
    use super::{Prob, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        Prob::from(value).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let prob = Prob::deserialize(d)?;
        prob.exact()
            .ok_or_else(|| D::Error::custom(format!("bad fraction `{}`", prob.fraction)))
    }
}

/// Serde adapter for `vertex -> probability` maps.
pub mod serde_prob_map {
    use super::{Prob, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<usize, Rational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let wire: BTreeMap<usize, Prob> = map.iter().map(|(k, v)| (*k, Prob::from(v))).collect();
        wire.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<usize, Rational>, D::Error> {
        BTreeMap::<usize, Prob>::deserialize(d)?
            .into_iter()
            .map(|(k, p)| {
                p.exact()
                    .map(|v| (k, v))
                    .ok_or_else(|| D::Error::custom(format!("bad fraction `{}`", p.fraction)))
            })
            .collect()
    }
}
