//! Exact rational scalars.
//!
//! Every probability and reward component in this crate is a [`Rational`].
//! All arithmetic is exact; nothing in the core computation touches
//! floating point, so set membership and set equality downstream are
//! decidable without tolerances.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact rational number, stored in lowest terms with a positive
/// denominator.
///
/// Accepted literal forms are integers (`"11"`, `-5`), fractions
/// (`"3/4"`, `"-19/4"`) and plain decimals (`"0.75"`, `"-9.046875"`).
/// Decimals are converted exactly; scientific notation is rejected.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
}

impl Rational {
    /// `numerator / denominator`. Panics if `denominator` is zero.
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "zero denominator");
        Rational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_int(value: i64) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    /// Rounds to `places` decimal digits, halves away from zero.
    /// The result is the exact rational `k / 10^places`.
    pub fn round_dp(&self, places: u32) -> Rational {
        let scale = BigInt::from(10u8).pow(places);
        let k = round_half_away(&(&self.0 * BigRational::from_integer(scale.clone())));
        Rational(BigRational::new(k, scale))
    }

    /// Fixed-point decimal rendering with exactly `places` digits after
    /// the point, rounding halves away from zero first.
    pub fn decimal_string(&self, places: u32) -> String {
        let scale = BigInt::from(10u8).pow(places);
        let k = round_half_away(&(&self.0 * BigRational::from_integer(scale.clone())));
        let sign = if k.sign() == Sign::Minus { "-" } else { "" };
        let (int_part, frac_part) = k.magnitude().div_rem(scale.magnitude());
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac:0>width$}", frac = frac_part.to_string(), width = places as usize)
        }
    }
}

/// Nearest integer to `x`, rounding halves away from zero.
fn round_half_away(x: &BigRational) -> BigInt {
    if x.is_negative() {
        return -round_half_away(&-x);
    }
    // floor(x + 1/2) = floor((2n + d) / 2d) for x = n/d >= 0
    let two = BigInt::from(2);
    (x.numer() * &two + x.denom()).div_floor(&(x.denom() * &two))
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_int(value)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let malformed = || ParseRationalError::Malformed(s.to_string());

        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.parse().map_err(|_| malformed())?;
            if den.starts_with(['+', '-']) {
                return Err(malformed());
            }
            let den: BigInt = den.parse().map_err(|_| malformed())?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator);
            }
            return Ok(Rational(BigRational::new(num, den)));
        }

        if let Some((int_part, frac_part)) = s.split_once('.') {
            let (negative, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
            };
            if int_digits.is_empty() && frac_part.is_empty() {
                return Err(malformed());
            }
            if !int_digits.bytes().all(|b| b.is_ascii_digit())
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(malformed());
            }
            let int: BigInt = if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().map_err(|_| malformed())? };
            let frac: BigInt = if frac_part.is_empty() { BigInt::zero() } else { frac_part.parse().map_err(|_| malformed())? };
            let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
            let magnitude = int * &scale + frac;
            let signed = if negative { -magnitude } else { magnitude };
            return Ok(Rational(BigRational::new(signed, scale)));
        }

        let int: BigInt = s.parse().map_err(|_| malformed())?;
        Ok(Rational(BigRational::from_integer(int)))
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

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! binop_impl {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

binop_impl!(Add, add);
binop_impl!(Sub, sub);
binop_impl!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl de::Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational string like \"3/4\" or \"0.75\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational(BigRational::from_integer(v.into())))
            }

            fn visit_f64<E: de::Error>(self, _: f64) -> Result<Rational, E> {
                Err(E::custom(
                    "decimal values must be written as strings (e.g. \"0.75\") to stay exact",
                ))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}
