//! Exact rationals and the two-sided extended line used for tropical coordinates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary precision rational, always stored reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`. Decimal points and zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Returns the integer value of `r` if it has denominator one.
pub fn as_integer(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Gcd of the entries, zero for the zero vector.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| g.gcd(&x))
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

/// A point of `[-inf, +inf]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    MinusInfinity,
    Finite(Rational),
    PlusInfinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    /// Sign of the infinity, zero for finite values.
    pub fn infinity_sign(&self) -> i64 {
        match self {
            ExtRational::MinusInfinity => -1,
            ExtRational::Finite(_) => 0,
            ExtRational::PlusInfinity => 1,
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtRational::PlusInfinity),
            "-inf" => Ok(ExtRational::MinusInfinity),
            other => parse_rational(other).map(ExtRational::Finite),
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtRational::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ExtRational {
    fn rank(&self) -> i8 {
        match self {
            ExtRational::MinusInfinity => -1,
            ExtRational::Finite(_) => 0,
            ExtRational::PlusInfinity => 1,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::MinusInfinity => f.write_str("-inf"),
            ExtRational::PlusInfinity => f.write_str("+inf"),
            ExtRational::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Approximate value for rendering only.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&int(4)), "4");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn extended_order() {
        let mut v = vec![
            ExtRational::PlusInfinity,
            ExtRational::Finite(int(2)),
            ExtRational::MinusInfinity,
            ExtRational::Finite(int(-7)),
        ];
        v.sort();
        assert_eq!(v[0], ExtRational::MinusInfinity);
        assert_eq!(v[1], ExtRational::Finite(int(-7)));
        assert_eq!(v[3], ExtRational::PlusInfinity);
        assert_eq!(ExtRational::parse("-inf").unwrap(), ExtRational::MinusInfinity);
    }
}
