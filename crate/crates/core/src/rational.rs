//! Exact rational values used for every power measure.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in reduced form with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalValue(BigRational);

impl RationalValue {
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Self(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_counts(numer: &BigUint, denom: &BigUint) -> Self {
        Self(BigRational::new(
            BigInt::from(numer.clone()),
            BigInt::from(denom.clone()),
        ))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Lossy decimal approximation for display.
    pub fn to_f64(&self) -> f64 {
        match (self.0.numer().to_f64(), self.0.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => self.0.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Converts a finite float exactly (binary fractions like 0.25 stay exact).
    pub fn from_f64(value: f64) -> Option<Self> {
        BigRational::from_float(value).map(Self)
    }
}

impl From<BigRational> for RationalValue {
    fn from(value: BigRational) -> Self {
        Self(value)
    }
}

impl std::ops::Add for RationalValue {
    type Output = RationalValue;
    fn add(self, rhs: Self) -> Self::Output {
        Self(self.0 + rhs.0)
    }
}

impl<'a> std::ops::Add<&'a RationalValue> for &'a RationalValue {
    type Output = RationalValue;
    fn add(self, rhs: &'a RationalValue) -> Self::Output {
        RationalValue(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for RationalValue {
    type Output = RationalValue;
    fn sub(self, rhs: Self) -> Self::Output {
        Self(self.0 - rhs.0)
    }
}

impl std::ops::Mul for RationalValue {
    type Output = RationalValue;
    fn mul(self, rhs: Self) -> Self::Output {
        Self(self.0 * rhs.0)
    }
}

impl std::ops::Div for RationalValue {
    type Output = RationalValue;
    fn div(self, rhs: Self) -> Self::Output {
        Self(self.0 / rhs.0)
    }
}

impl std::iter::Sum for RationalValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for RationalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for RationalValue {
    type Err = Error;

    /// Accepts `num/den`, a plain integer, or a decimal literal such as `0.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Self::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            let digits = format!("{int_digits}{frac}");
            let mut n: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().map_err(|_| bad())?
            };
            if negative {
                n = -n;
            }
            let d = num_traits::pow(BigInt::from(10u32), frac.len());
            return Ok(Self::new(n, d));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Self::from_integer(n))
    }
}

impl Serialize for RationalValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
