//! Exact rational arithmetic helpers.
//!
//! Every utility, weight and factor in this crate is a [`Num`], an
//! arbitrary-precision rational. Nothing is ever compared with a tolerance.
//! The only irrational threshold that algorithms need, √2, is handled by
//! comparing squares.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number used for all magnitudes.
pub type Num = BigRational;

/// `p/q` as a [`Num`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Num {
    Num::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Num {
    Num::from_integer(BigInt::from(p))
}

/// Rational stand-in for √2 used by instance generators (14142135/10⁷).
pub fn sqrt2_approx() -> Num {
    rat(14_142_135, 10_000_000)
}

/// Default rational stand-in for the golden ratio (1618/1000).
pub fn phi_approx() -> Num {
    rat(1618, 1000)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational `{input}`: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"1.618"`.
pub fn parse_rational(text: &str) -> Result<Num, ParseRationalError> {
    let s = text.trim();
    let err = |reason| ParseRationalError {
        input: text.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err("bad numerator"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Num::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err("bad decimal fraction"));
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole_val = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(whole_digits).map_err(|_| err("bad integer part"))?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_val = BigInt::from_str(frac).map_err(|_| err("bad decimal fraction"))?;
        let mut value = Num::new(whole_val * &scale + frac_val, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    BigInt::from_str(s)
        .map(Num::from_integer)
        .map_err(|_| err("not an integer"))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(x: &Num) -> String {
    x.to_string()
}

/// Decimal rendering rounded half away from zero to `places` digits.
pub fn to_decimal(x: &Num, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = x.abs() * Num::from_integer(scale.clone());
    // round half up on the magnitude
    let twice = &scaled * int(2);
    let rounded = (twice.floor() + Num::one())
        .to_integer()
        .div_floor(&BigInt::from(2));
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!(
            "{sign}{whole}.{:0>width$}",
            frac.to_string(),
            width = places
        )
    }
}

/// Lossy conversion for display and CSV only.
pub fn to_f64(x: &Num) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Decides `x ≥ √2 · y` exactly for nonnegative `x`, `y`.
pub fn ge_sqrt2_times(x: &Num, y: &Num) -> bool {
    debug_assert!(!x.is_negative() && !y.is_negative());
    x * x >= y * y * int(2)
}

/// A rational or +∞. Used for improvement factors, the relationship
/// imbalance and the supermodularity degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Num),
    Infinite,
}

impl Extended {
    pub fn one() -> Self {
        Extended::Finite(Num::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&Num> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(x) => to_f64(x),
            Extended::Infinite => f64::INFINITY,
        }
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Num> for Extended {
    fn from(x: Num) -> Self {
        Extended::Finite(x)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Extended {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(Extended::Infinite),
            other => parse_rational(other).map(Extended::Finite),
        }
    }
}

/// Improvement factor `new / old` with the conventions `0/0 = 1` and
/// `positive/0 = +∞`.
pub fn improvement_factor(new: &Num, old: &Num) -> Extended {
    if old.is_zero() {
        if new.is_positive() {
            Extended::Infinite
        } else {
            Extended::one()
        }
    } else {
        Extended::Finite(new / old)
    }
}

/// A stability threshold: either an exact rational or the symbolic √2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Threshold {
    Rational(Num),
    Sqrt2,
}

impl Threshold {
    pub fn rational(x: Num) -> Self {
        Threshold::Rational(x)
    }

    /// True iff `factor ≤ threshold`.
    pub fn admits(&self, factor: &Extended) -> bool {
        match (self, factor) {
            (_, Extended::Infinite) => false,
            (Threshold::Rational(t), Extended::Finite(f)) => f <= t,
            (Threshold::Sqrt2, Extended::Finite(f)) => f.is_negative() || f * f <= int(2),
        }
    }

    /// True iff `new ≥ threshold · old` (both nonnegative).
    pub fn cleared_by(&self, new: &Num, old: &Num) -> bool {
        match self {
            Threshold::Rational(t) => new >= &(t * old),
            Threshold::Sqrt2 => ge_sqrt2_times(new, old),
        }
    }

    pub fn at_least_one(&self) -> bool {
        match self {
            Threshold::Rational(t) => t >= &Num::one(),
            Threshold::Sqrt2 => true,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Rational(x) => write!(f, "{x}"),
            Threshold::Sqrt2 => f.write_str("sqrt2"),
        }
    }
}

impl FromStr for Threshold {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sqrt2" | "√2" => Ok(Threshold::Sqrt2),
            other => parse_rational(other).map(Threshold::Rational),
        }
    }
}

/// Serde adapter writing a [`Num`] as its canonical string.
pub mod serde_num {
    use super::{format_rational, parse_rational, Num};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Num, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Num, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Vec<Num>`.
pub mod serde_num_vec {
    use super::{format_rational, parse_rational, Num};
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Num], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_rational(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Num>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(de::Error::custom))
            .collect()
    }
}

/// Serde adapter for [`Extended`] (`"inf"` for +∞).
pub mod serde_extended {
    use super::Extended;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Extended, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Extended, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(de::Error::custom)
    }
}

/// Serialize-only adapter for `Vec<Extended>`.
pub mod serde_extended_vec {
    use super::Extended;
    use serde::{ser::SerializeSeq, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Extended], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

/// Serialize-only adapter for `Option<Extended>` (`null` when absent).
pub mod serde_extended_opt {
    use super::Extended;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Extended>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}
