//! Numeric backends.
//!
//! Every solver is generic over [`Scalar`]. Two implementations ship:
//! `f64` for general use and [`Rational`] (arbitrary-precision fractions)
//! for exact reproduction of hand-computed examples. Comparisons go through
//! the tolerance helpers here so the same code path is exact on rationals
//! and tolerant on floats.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Field element used throughout the crate.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
{
    /// True when arithmetic is exact and tolerances collapse to zero.
    const EXACT: bool;

    /// Relative tolerance used by the comparison helpers (zero when exact).
    fn rel_eps() -> f64;

    fn int(v: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }

    /// Lossy conversion for reporting.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a float; exact types take the binary expansion verbatim.
    fn from_float(v: f64) -> Self;

    /// Parses `"3"`, `"-2.5"`, `"5/11"` or scientific notation.
    fn parse_value(s: &str) -> Result<Self>;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    /// Strictly greater than zero (`Signed::is_positive` accepts `0.0`).
    fn positive(&self) -> bool {
        *self > Self::zero()
    }

    /// Strictly less than zero.
    fn negative(&self) -> bool {
        *self < Self::zero()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// Absolute tolerance for quantities of magnitude `scale`.
    fn tol(scale: &Self) -> Self {
        if Self::EXACT {
            Self::zero()
        } else {
            let s = scale.abs().as_f64().max(1.0);
            Self::from_float(Self::rel_eps() * s)
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn rel_eps() -> f64 {
        1e-12
    }

    fn int(v: i64) -> Self {
        v as f64
    }

    fn from_float(v: f64) -> Self {
        v
    }

    fn parse_value(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::parse(s))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::parse(s))?;
            if d == 0.0 {
                return Err(Error::parse(s));
            }
            return Ok(n / d);
        }
        let v: f64 = s.parse().map_err(|_| Error::parse(s))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::parse(s))
        }
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        Ok(Rational::from_json(v)?.as_f64())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn rel_eps() -> f64 {
        0.0
    }

    fn int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_float(v: f64) -> Self {
        Rational::from_f64(v).expect("finite float")
    }

    fn parse_value(s: &str) -> Result<Self> {
        parse_exact(s.trim()).ok_or_else(|| Error::parse(s))
    }

    fn to_json(&self) -> Value {
        serde_json::json!({ "num": bigint_json(self.numer()), "den": bigint_json(self.denom()) })
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::int(i))
                } else {
                    let text = n.to_string();
                    parse_exact(&text).ok_or_else(|| Error::parse(&text))
                }
            }
            Value::String(s) => Self::parse_value(s),
            Value::Object(map) => {
                let num = map.get("num").ok_or_else(|| Error::parse("missing num"))?;
                let den = map.get("den").ok_or_else(|| Error::parse("missing den"))?;
                let num = json_bigint(num)?;
                let den = json_bigint(den)?;
                if den.is_zero() {
                    return Err(Error::parse("zero denominator"));
                }
                Ok(Rational::new(num, den))
            }
            other => Err(Error::parse(&other.to_string())),
        }
    }
}

fn bigint_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(v.to_string()),
    }
}

fn json_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::parse(&n.to_string())),
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| Error::parse(s)),
        other => Err(Error::parse(&other.to_string())),
    }
}

/// Exact parse of integers, fractions and decimal/scientific literals.
fn parse_exact(s: &str) -> Option<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_exact(n.trim())?;
        let d = parse_exact(d.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// `a <= b` up to the scalar tolerance at magnitude `scale`.
pub fn le_tol<S: Scalar>(a: &S, b: &S, scale: &S) -> bool {
    a.clone() <= b.clone() + S::tol(scale)
}

/// `a == b` up to the scalar tolerance at magnitude `scale`.
pub fn eq_tol<S: Scalar>(a: &S, b: &S, scale: &S) -> bool {
    (a.clone() - b.clone()).abs() <= S::tol(scale)
}

/// `a > 0` beyond tolerance.
pub fn pos_tol<S: Scalar>(a: &S, scale: &S) -> bool {
    a.clone() > S::tol(scale)
}

pub fn sum<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(it: I) -> S {
    it.into_iter().fold(S::zero(), |acc, v| acc + v.clone())
}

pub fn sign<S: Scalar>(v: &S) -> S {
    if v.is_zero() {
        S::zero()
    } else if v.positive() {
        S::one()
    } else {
        -S::one()
    }
}

/// Exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::ratio(num, den)
}
