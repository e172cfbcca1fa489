//! Exact rationals, their `"p/q"` text form, and an extended real line with
//! a symbolic negative infinity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidSpec(format!("`{s}` is not an exact fraction"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Always `"p/q"`, reduced, with a positive denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serde adapter for a single rational as a fraction string.
pub mod fraction {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals as fraction strings.
pub mod fractions {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Serde adapter for an optional list of rationals.
pub mod opt_fractions {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        let strs = Option::<Vec<String>>::deserialize(d)?;
        strs.map(|v| v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()).transpose()
    }
}

/// Checks that weights are strictly positive and sum to one.
pub fn check_distribution(weights: &[Rational]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no weights given".into()));
    }
    if let Some(w) = weights.iter().find(|w| *w <= &Rational::zero()) {
        return Err(Error::InvalidWeights(format!("weight {} is not positive", format_rational(w))));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::InvalidWeights(format!("weights sum to {}", format_rational(&total))));
    }
    Ok(())
}

/// A rational or negative infinity. Adding anything to `-∞` stays `-∞`, and
/// scaling by a positive weight preserves it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtReal {
    NegInf,
    Finite(Rational),
}

impl ExtReal {
    pub fn zero() -> Self {
        ExtReal::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtReal::Finite(Rational::one())
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    /// Multiplies by a strictly positive weight.
    pub fn scale(&self, w: &Rational) -> ExtReal {
        debug_assert!(w > &Rational::zero());
        match self {
            ExtReal::NegInf => ExtReal::NegInf,
            ExtReal::Finite(x) => ExtReal::Finite(x * w),
        }
    }
}

impl Add for &ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: &ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::NegInf,
        }
    }
}

impl Mul<&Rational> for &ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: &Rational) -> ExtReal {
        self.scale(rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::NegInf, ExtReal::NegInf) => Ordering::Equal,
            (ExtReal::NegInf, _) => Ordering::Less,
            (_, ExtReal::NegInf) => Ordering::Greater,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(r) => f.write_str(&format_rational(r)),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "-inf" {
            Ok(ExtReal::NegInf)
        } else {
            parse_rational(&s).map(ExtReal::Finite).map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_text_round_trips() {
        for s in ["1/3", "-2/5", "7/1", "0/1"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("4/8").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn negative_infinity_absorbs() {
        let x = ExtReal::Finite(ratio(1, 2));
        assert!((&x + &ExtReal::NegInf).is_neg_inf());
        assert!(ExtReal::NegInf.scale(&ratio(1, 100)).is_neg_inf());
        assert!(ExtReal::NegInf < ExtReal::Finite(int(-1_000_000)));
        assert_eq!(&x + &x, ExtReal::one());
    }

    #[test]
    fn distributions_must_be_positive_and_normalized() {
        assert!(check_distribution(&[ratio(1, 2), ratio(1, 2)]).is_ok());
        assert!(check_distribution(&[ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(check_distribution(&[int(1), int(0)]).is_err());
    }
}
