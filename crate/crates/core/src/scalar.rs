//! Numeric backends.
//!
//! Every probability-carrying type is generic over [`Scalar`]. Two backends
//! exist: [`Rational`] (arbitrary precision, exact) for oracle-mode recovery
//! and `f64` for anything fed by samples.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational number.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{0}` as a probability literal")]
pub struct ParseScalarError(pub String);

/// A probability as it appears in a JSON file: a plain number, or a string
/// holding a fraction (`"1/3"`) or decimal (`"0.25"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbLiteral {
    Number(f64),
    Text(String),
}

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact and tolerances collapse to zero.
    const EXACT: bool;

    fn from_f64(x: f64) -> Self;

    fn from_ratio(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;

    fn parse_literal(lit: &ProbLiteral) -> Result<Self, ParseScalarError>;

    fn to_literal(&self) -> ProbLiteral;

    /// Absolute slack used for sign and equality tests at magnitude `scale`:
    /// zero for exact backends, `rel * |scale|` otherwise.
    fn slack(scale: &Self, rel: f64) -> Self;

    fn sum<'a, I>(iter: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        iter.into_iter().fold(Self::zero(), |acc, x| acc + x.clone())
    }

    /// `|self - other| <= slack(scale, rel)`.
    fn approx_eq(&self, other: &Self, scale: &Self, rel: f64) -> bool {
        (self.clone() - other.clone()).abs() <= Self::slack(scale, rel)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(lit: &ProbLiteral) -> Result<Self, ParseScalarError> {
        match lit {
            ProbLiteral::Number(x) => Ok(*x),
            ProbLiteral::Text(s) => {
                parse_rational(s).map(|r| ToPrimitive::to_f64(&r).unwrap_or(f64::NAN)).and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(ParseScalarError(s.clone()))
                    }
                })
            }
        }
    }

    fn to_literal(&self) -> ProbLiteral {
        ProbLiteral::Number(*self)
    }

    fn slack(scale: &Self, rel: f64) -> Self {
        rel * scale.abs()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    /// The exact binary value of `x`.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(Zero::zero)
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    /// JSON numbers are read through their shortest round-trip decimal form,
    /// so `0.1` becomes `1/10` rather than the nearest binary double.
    fn parse_literal(lit: &ProbLiteral) -> Result<Self, ParseScalarError> {
        match lit {
            ProbLiteral::Number(x) => {
                if !x.is_finite() {
                    return Err(ParseScalarError(x.to_string()));
                }
                parse_rational(&format!("{x}"))
            }
            ProbLiteral::Text(s) => parse_rational(s),
        }
    }

    fn to_literal(&self) -> ProbLiteral {
        if self.is_integer() {
            ProbLiteral::Number(Scalar::to_f64(self))
        } else {
            ProbLiteral::Text(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn slack(_scale: &Self, _rel: f64) -> Self {
        Self::zero()
    }
}

/// Parses `"p/q"`, integers, and decimals with an optional exponent
/// (`"1.5e-3"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseScalarError> {
    let err = || ParseScalarError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Converts between backends. Rationals become their nearest double; doubles
/// become their exact binary value.
pub fn convert<A: Scalar, B: Scalar>(x: &A) -> B {
    if A::EXACT && B::EXACT {
        // Both exact: go through the literal form to stay lossless.
        B::parse_literal(&x.to_literal()).unwrap_or_else(|_| B::from_f64(x.to_f64()))
    } else {
        B::from_f64(x.to_f64())
    }
}

/// Convenience for tests and fixtures: `ratio(1, 3)` in any backend.
pub fn ratio<S: Scalar>(num: u64, den: u64) -> S {
    S::from_ratio(num, den)
}
