//! Arbitrary-precision rational numbers with a stable `"p/q"` wire format.
//!
//! All quantities in this crate are exact rationals; floating point appears
//! only in cosmetic `approx` output fields. `Rat` wraps a reduced
//! `num_rational::BigRational` and adds the serialization contract plus the
//! integer-square-root bracketing used where irrational square roots have to
//! be bounded by rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RatError {
    #[error("invalid rational literal {0:?}: expected \"p\", \"p/q\" or a decimal")]
    Parse(String),
    #[error("zero denominator in rational")]
    ZeroDenominator,
}

/// An exact rational number. Always stored reduced with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `num/den` from machine integers. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Rat, RatError> {
        if den.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(num, den)))
    }

    pub fn int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "division by zero rational");
        Rat(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Rat {
        Rat(self.0.pow(exp))
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Exact square root if `self` is a perfect square of a rational,
    /// `None` otherwise (including all negative inputs).
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.is_negative() {
            return None;
        }
        let (num, den) = (self.numer(), self.denom());
        let sn = num.sqrt();
        let sd = den.sqrt();
        if &(&sn * &sn) == num && &(&sd * &sd) == den {
            Some(Rat(BigRational::new(sn, sd)))
        } else {
            None
        }
    }

    /// Rational bracket `lo <= sqrt(self) <= hi` with
    /// `hi - lo <= 1 / (denom * 2^bits)`. When `self` is a perfect square the
    /// bracket collapses to the exact root. Panics on negative input.
    pub fn sqrt_bounds(&self, bits: u32) -> (Rat, Rat) {
        assert!(!self.is_negative(), "sqrt of negative rational");
        if let Some(r) = self.sqrt_exact() {
            return (r.clone(), r);
        }
        // sqrt(p/q) = sqrt(p*q) / q; scaling p*q by 4^bits refines the
        // integer square root to granularity 1/(q*2^bits).
        let scaled = (self.numer() * self.denom()) << (2 * bits);
        let s = scaled.sqrt();
        let den = self.denom() << bits;
        let lo = Rat(BigRational::new(s.clone(), den.clone()));
        let hi = Rat(BigRational::new(s + 1, den));
        (lo, hi)
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounded to
    /// nearest (ties away from zero). Used for cosmetic `approx` fields.
    pub fn decimal_string(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        // round(|x| * 10^digits) = floor((2*|num|*scale + den) / (2*den))
        let num = self.numer().abs() * &scale;
        let q: BigInt = (&num * 2 + self.denom()) / (self.denom() * 2);
        let int_part = &q / &scale;
        let frac_part = &q % &scale;
        let sign = if self.is_negative() && !q.is_zero() {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!(
                "{sign}{int_part}.{frac:0>width$}",
                frac = frac_part.to_string(),
                width = digits as usize
            )
        }
    }

    /// Nearest `f64` (cosmetic only; all logic stays exact).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = RatError;

    /// Accepts `"p"`, `"p/q"` and plain decimals like `"0.25"`.
    fn from_str(s: &str) -> Result<Rat, RatError> {
        let t = s.trim();
        let err = || RatError::Parse(s.to_string());
        if let Some((num, den)) = t.split_once('/') {
            let n: BigInt = num.trim().parse().map_err(|_| err())?;
            let d: BigInt = den.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(RatError::ZeroDenominator);
            }
            Ok(Rat(BigRational::new(n, d)))
        } else if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let negative = int.trim_start().starts_with('-');
            let i: BigInt = if int.is_empty() || int == "-" {
                BigInt::zero()
            } else {
                int.parse().map_err(|_| err())?
            };
            let f: BigInt = frac.parse().map_err(|_| err())?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let num = i.abs() * &scale + f;
            let num = if negative { -num } else { num };
            Ok(Rat(BigRational::new(num, scale)))
        } else {
            let n: BigInt = t.parse().map_err(|_| err())?;
            Ok(Rat(BigRational::from_integer(n)))
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        struct RatVisitor;
        impl de::Visitor<'_> for RatVisitor {
            type Value = Rat;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"p/q\" string or integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                v.parse().map_err(de::Error::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(BigInt::from(v))))
            }
        }
        deserializer.deserialize_any(RatVisitor)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl From<usize> for Rat {
    fn from(n: usize) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl MulAssign for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        self.0 *= rhs.0;
    }
}

impl DivAssign<&Rat> for Rat {
    fn div_assign(&mut self, rhs: &Rat) {
        self.0 /= &rhs.0;
    }
}

impl DivAssign for Rat {
    fn div_assign(&mut self, rhs: Rat) {
        self.0 /= rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

/// Shorthand used across tests and fixtures.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}
