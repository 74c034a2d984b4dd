//! Exact rational arithmetic for capacities, rates, and error probabilities.
//!
//! JSON encoding: an integer where the value is integral, otherwise the
//! string `"p/q"` in lowest terms. Both forms are accepted on input.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_u64(v: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// Exact ratio of two counts, e.g. failing tuples over total tuples.
    pub fn ratio_u64(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// 2^bits as an exact rational; `bits` may be negative.
    pub fn pow2(bits: i64) -> Self {
        let two = BigRational::from_integer(BigInt::from(2));
        Rational(num::pow::Pow::pow(two, bits))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as an exact u64, if it is an integer in range.
    pub fn to_u64(&self) -> Option<u64> {
        if !self.0.is_integer() {
            return None;
        }
        self.0.to_integer().to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Ceiling of a nonnegative value, as u64.
    pub fn ceil_u64(&self) -> u64 {
        assert!(!self.is_negative(), "ceil_u64 needs a nonnegative value");
        self.0
            .ceil()
            .to_integer()
            .to_u64()
            .expect("ceiling fits in u64")
    }

    /// self * n, exact.
    pub fn scale_u64(&self, n: u64) -> Self {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact integer power.
    pub fn powi(&self, exp: i32) -> Self {
        Rational(num::pow::Pow::pow(self.0.clone(), exp as i64))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigInt, Error> {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parameter(format!("invalid rational literal {s:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => {
                let numer = parse_int(p)?;
                let denom = parse_int(q)?;
                if denom.is_zero() {
                    return Err(Error::Parameter(format!("zero denominator in {s:?}")));
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(v) = self.0.to_integer().to_i64() {
                return serializer.serialize_i64(v);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RatVisitor;

        impl Visitor<'_> for RatVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_u64(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(|e| E::custom(format!("{e}")))
            }
        }

        deserializer.deserialize_any(RatVisitor)
    }
}

impl FromPrimitive for Rational {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Rational::from_int(n))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Rational::from_u64(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let half: Rational = "1/2".parse().unwrap();
        assert_eq!(half, Rational::new(1, 2));
        assert_eq!(half.to_string(), "1/2");
        let three: Rational = "3".parse().unwrap();
        assert_eq!(three.to_string(), "3");
        assert_eq!("6/4".parse::<Rational>().unwrap().to_string(), "3/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn json_forms() {
        let half = Rational::new(1, 2);
        assert_eq!(serde_json::to_string(&half).unwrap(), "\"1/2\"");
        let two = Rational::from_int(2);
        assert_eq!(serde_json::to_string(&two).unwrap(), "2");
        let back: Rational = serde_json::from_str("\"1/2\"").unwrap();
        assert_eq!(back, half);
        let back: Rational = serde_json::from_str("2").unwrap();
        assert_eq!(back, two);
    }

    #[test]
    fn arithmetic_and_order() {
        let a = Rational::new(1, 3);
        let b = Rational::new(1, 6);
        assert_eq!(&a + &b, Rational::new(1, 2));
        assert_eq!(&a - &b, b);
        assert_eq!(&a * &b, Rational::new(1, 18));
        assert_eq!(&a / &b, Rational::from_int(2));
        assert!(b < a);
        assert_eq!(Rational::pow2(-2), Rational::new(1, 4));
        assert_eq!(Rational::pow2(3), Rational::from_int(8));
    }

    #[test]
    fn integer_extraction() {
        assert_eq!(Rational::new(6, 3).to_u64(), Some(2));
        assert_eq!(Rational::new(1, 2).to_u64(), None);
        assert_eq!(Rational::new(1, 2).scale_u64(4).to_u64(), Some(2));
    }
}
