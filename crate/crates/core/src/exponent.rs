//! Exact exponents in `[1, ∞]` and exponent tuples.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"7/11"`, `"-3"`, `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("malformed rational {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: i64 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let mag = whole
            .checked_mul(den)
            .and_then(|w| w.checked_add(f))
            .ok_or_else(bad)?;
        return Ok(Rational::new(if negative { -mag } else { mag }, den));
    }
    t.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A Lebesgue exponent; `Infinite` has reciprocal 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn int(p: i64) -> Self {
        Exponent::Finite(Rational::from_integer(p))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Rational::new(num, den))
    }

    /// Exponent with the given reciprocal; `0 ↦ ∞`.
    pub fn from_reciprocal(r: Rational) -> Result<Self> {
        if r.is_zero() {
            Ok(Exponent::Infinite)
        } else if r > Rational::zero() {
            Ok(Exponent::Finite(r.recip()))
        } else {
            Err(Error::InvalidExponent(format!(
                "negative reciprocal {}",
                format_rational(r)
            )))
        }
    }

    pub fn reciprocal(&self) -> Rational {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => rational_to_f64(*p),
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Hölder conjugate `p' = p/(p−1)`.
    pub fn conjugate(&self) -> Result<Self> {
        Exponent::from_reciprocal(Rational::one() - self.reciprocal())
    }

    fn check_at_least_one(self) -> Result<Self> {
        if let Exponent::Finite(p) = self {
            if p < Rational::one() {
                return Err(Error::InvalidExponent(format!(
                    "exponent {} is below 1",
                    format_rational(p)
                )));
            }
        }
        Ok(self)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => f.write_str(&format_rational(*p)),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, `infinity`, `∞`, or any rational `>= 1`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        Exponent::Finite(parse_rational(t)?).check_at_least_one()
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A tuple `(p₁, …, pₙ)` with every entry in `[1, ∞]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVec(Vec<Exponent>);

impl ExponentVec {
    pub fn new(entries: Vec<Exponent>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidExponent("empty exponent tuple".into()));
        }
        for e in &entries {
            e.check_at_least_one()?;
        }
        Ok(Self(entries))
    }

    /// Tuple of integer exponents; panics on entries below 1.
    pub fn ints(entries: &[i64]) -> Self {
        Self::new(entries.iter().map(|&p| Exponent::int(p)).collect()).expect("exponents >= 1")
    }

    /// Tuple with the same entry `p` repeated `n` times.
    pub fn uniform(n: usize, p: Exponent) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn from_reciprocals(r: &[Rational]) -> Result<Self> {
        Self::new(
            r.iter()
                .map(|&x| Exponent::from_reciprocal(x))
                .collect::<Result<_>>()?,
        )
    }

    pub fn entries(&self) -> &[Exponent] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reciprocals(&self) -> Vec<Rational> {
        self.0.iter().map(Exponent::reciprocal).collect()
    }

    /// `Σ 1/pᵢ` with `1/∞ = 0`.
    pub fn reciprocal_sum(&self) -> Rational {
        self.0.iter().map(Exponent::reciprocal).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Exponent::to_f64).collect()
    }

    /// Every entry strictly between 1 and ∞.
    pub fn strictly_inside(&self) -> bool {
        self.0.iter().all(|e| match e {
            Exponent::Finite(p) => *p > Rational::one(),
            Exponent::Infinite => false,
        })
    }
}

impl fmt::Display for ExponentVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for ExponentVec {
    type Err = Error;

    /// Comma-separated list such as `4,6` or `2,inf,8/3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        Self::new(t.split(',').map(str::parse).collect::<Result<_>>()?)
    }
}

impl Serialize for ExponentVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for ExponentVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Exponent>::deserialize(d)?;
        ExponentVec::new(v).map_err(serde::de::Error::custom)
    }
}
