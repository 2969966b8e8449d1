//! Exact rational probabilities.
//!
//! Every closed-form quantity in this crate is carried as a [`Probability`],
//! a reduced fraction in `[0, 1]`. Floating point only appears when a value
//! is displayed or compared with a Monte Carlo estimate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A probability stored as an exact fraction in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Probability(BigRational);

impl Probability {
    pub fn zero() -> Self {
        Probability(BigRational::zero())
    }

    pub fn one() -> Self {
        Probability(BigRational::one())
    }

    /// `numerator / denominator`, rejected unless it lies in `[0, 1]`.
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidProbability(format!("{numerator}/{denominator} has a zero denominator")));
        }
        Self::from_ratio(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_ratio(value: BigRational) -> Result<Self> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(Error::InvalidProbability(format!("{value} is outside [0, 1]")));
        }
        Ok(Probability(value))
    }

    /// Wraps a value the caller has already shown to be in range.
    pub(crate) fn from_ratio_unchecked(value: BigRational) -> Self {
        debug_assert!(value >= BigRational::zero() && value <= BigRational::one(), "{value}");
        Probability(value)
    }

    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Numerator and denominator as `u64`, when both fit.
    pub fn to_u64_parts(&self) -> Option<(u64, u64)> {
        Some((self.0.numer().to_u64()?, self.0.denom().to_u64()?))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn complement(&self) -> Self {
        Probability(BigRational::one() - &self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Decides a Bernoulli trial from one uniform 64-bit word.
    ///
    /// Returns `word / 2^64 < self`. The event has probability
    /// `ceil(self * 2^64) / 2^64`, which differs from `self` by less than
    /// `2^-64`; `0` never fires and `1` always fires.
    pub fn covers(&self, word: u64) -> bool {
        if let Some((num, den)) = self.to_u64_parts() {
            ((word as u128) * (den as u128)) < ((num as u128) << 64)
        } else {
            let lhs = BigInt::from(word) * self.0.denom();
            let rhs: BigInt = self.0.numer() << 64;
            lhs < rhs
        }
    }

    /// `a/b` form; integers print without a denominator.
    pub fn to_fraction_string(&self) -> String {
        self.0.to_string()
    }

    /// Decimal rendering rounded to six places.
    pub fn to_decimal_string(&self) -> String {
        format!("{:.6}", self.to_f64())
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Mul for &Probability {
    type Output = Probability;
    fn mul(self, rhs: Self) -> Probability {
        Probability(&self.0 * &rhs.0)
    }
}

impl PartialEq<BigRational> for Probability {
    fn eq(&self, other: &BigRational) -> bool {
        &self.0 == other
    }
}

impl PartialOrd<BigRational> for Probability {
    fn partial_cmp(&self, other: &BigRational) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

/// Shorthand for an in-range constant fraction, panicking otherwise.
pub fn prob(numerator: u64, denominator: u64) -> Probability {
    Probability::new(numerator, denominator).expect("constant probability out of range")
}

/// Shorthand for an arbitrary rational (not necessarily a probability).
pub fn ratio(numerator: i64, denominator: i64) -> BigRational {
    BigRational::new(numerator.into(), denominator.into())
}

/// Parses `"a/b"`, an integer, or a finite decimal such as `"0.25"`.
/// Decimals are converted exactly, so `"0.1"` is `1/10`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidProbability(format!("cannot parse {text:?} as a rational"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let num = if negative { BigInt::from_biguint(Sign::Minus, num.magnitude().clone()) } else { num };
    Ok(BigRational::new(num, den))
}

impl FromStr for Probability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Probability::from_ratio(parse_rational(s)?)
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ProbabilityVisitor;

        impl Visitor<'_> for ProbabilityVisitor {
            type Value = Probability;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a probability as \"a/b\", a decimal string, or a number in [0, 1]")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Probability, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Probability, E> {
                Probability::new(v, 1).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Probability, E> {
                Probability::from_ratio(BigRational::from_integer(v.into())).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Probability, E> {
                // Go through the shortest round-trip decimal so 0.1 means 1/10.
                v.to_string().parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ProbabilityVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let p = Probability::new(6, 8).unwrap();
        assert_eq!(p.to_u64_parts(), Some((3, 4)));
        assert_eq!(p.to_string(), "3/4");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Probability::new(4, 3).is_err());
        assert!(Probability::new(1, 0).is_err());
        assert!("-1/2".parse::<Probability>().is_err());
        assert!("1.5".parse::<Probability>().is_err());
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!("1/2".parse::<Probability>().unwrap(), prob(1, 2));
        assert_eq!("0.25".parse::<Probability>().unwrap(), prob(1, 4));
        assert_eq!("0.1".parse::<Probability>().unwrap(), prob(1, 10));
        assert_eq!("1".parse::<Probability>().unwrap(), Probability::one());
        assert_eq!(".5".parse::<Probability>().unwrap(), prob(1, 2));
        assert!("abc".parse::<Probability>().is_err());
        assert!("1/x".parse::<Probability>().is_err());
        assert!(".".parse::<Probability>().is_err());
    }

    #[test]
    fn covers_extremes() {
        for word in [0, 1, u64::MAX / 2, u64::MAX] {
            assert!(!Probability::zero().covers(word));
            assert!(Probability::one().covers(word));
        }
        let half = prob(1, 2);
        assert!(half.covers(u64::MAX / 2));
        assert!(!half.covers(1 << 63));
    }

    #[test]
    fn covers_with_parts_beyond_u64() {
        let odd =
            Probability::from_ratio(BigRational::new((BigInt::from(1u8) << 70) + 1, (BigInt::from(1u8) << 72) + 3))
                .unwrap();
        assert!(odd.to_u64_parts().is_none());
        // slightly above 1/4
        assert!(odd.covers(u64::MAX / 4));
        assert!(!odd.covers(u64::MAX / 4 + 2));
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let json = serde_json::to_string(&prob(2, 3)).unwrap();
        assert_eq!(json, "\"2/3\"");
        let back: Probability = serde_json::from_str(&json).unwrap();
        assert_eq!(back, prob(2, 3));
        let from_num: Probability = serde_json::from_str("0.5").unwrap();
        assert_eq!(from_num, prob(1, 2));
        assert!(serde_json::from_str::<Probability>("2").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(prob(1, 3).to_decimal_string(), "0.333333");
        assert_eq!(prob(2, 3).to_decimal_string(), "0.666667");
    }
}
