//! Exact rationals and the 2-adic order.
//!
//! [`Rational`] wraps a reduced `BigRational` (positive denominator, coprime
//! parts), so equality and hashing are structural. The text form is `p/q`,
//! with `/q` omitted for integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// The 2-adic order of a rational: a finite exponent, or infinity for zero.
///
/// `Infinity` compares greater than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwoAdicOrder {
    Finite(i64),
    Infinity,
}

impl TwoAdicOrder {
    pub fn finite(self) -> Option<i64> {
        match self {
            TwoAdicOrder::Finite(n) => Some(n),
            TwoAdicOrder::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, TwoAdicOrder::Infinity)
    }
}

impl fmt::Display for TwoAdicOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoAdicOrder::Finite(n) => write!(f, "{n}"),
            TwoAdicOrder::Infinity => f.write_str("inf"),
        }
    }
}

/// An exact rational number, always stored in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`, reduced. Fails on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Result<Self, Error> {
        Self::from_big(BigInt::from(numer), BigInt::from(denom))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Result<Self, Error> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    /// 2^exp for any integer exponent.
    pub fn pow2(exp: i64) -> Self {
        let magnitude = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            Rational(BigRational::from_integer(magnitude))
        } else {
            Rational(BigRational::new_raw(BigInt::one(), magnitude))
        }
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// 2-adic order: trailing zero bits of the numerator minus those of the
    /// denominator. Only one of the two can be even in lowest terms.
    pub fn ord2(&self) -> TwoAdicOrder {
        match self.0.numer().trailing_zeros() {
            None => TwoAdicOrder::Infinity,
            Some(num_tz) => {
                let den_tz = self.0.denom().trailing_zeros().unwrap_or(0);
                TwoAdicOrder::Finite(num_tz as i64 - den_tz as i64)
            }
        }
    }

    /// Membership in the ring of rationals with odd denominator.
    pub fn is_two_adic_integer(&self) -> bool {
        self.0.denom().is_odd()
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }

    pub fn pow(&self, exp: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, exp))
    }

    /// `(self + other) / 2`.
    pub fn midpoint(&self, other: &Rational) -> Self {
        let sum = &self.0 + &other.0;
        Rational(sum / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        // BigRational constructors other than new_raw already reduce.
        Rational(r)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
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

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::ParseRational(s.to_string());
        let (numer, denom) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let numer: BigInt = numer.parse().map_err(|_| bad())?;
        let denom: BigInt = denom.parse().map_err(|_| bad())?;
        Rational::from_big(numer, denom)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Integers `A_i` and a common denominator `L` with `seq[i] = A_i / L`.
pub(crate) fn common_denominator(seq: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let lcm = seq.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints = seq.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
    (ints, lcm)
}

/// Compares `p/q` (q > 0, small) against a rational without allocating a
/// second big fraction when the caller already has machine integers.
pub(crate) fn cmp_small(p: i64, q: i64, r: &Rational) -> Ordering {
    let lhs = BigInt::from(p) * r.denom();
    let rhs = r.numer() * BigInt::from(q);
    lhs.cmp(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn ord2_examples() {
        assert_eq!(q("0").ord2(), TwoAdicOrder::Infinity);
        assert_eq!(q("12").ord2(), TwoAdicOrder::Finite(2));
        assert_eq!(q("3/8").ord2(), TwoAdicOrder::Finite(-3));
        assert_eq!(q("-6/10").ord2(), TwoAdicOrder::Finite(0));
        assert_eq!(q("-6/10"), q("-3/5"));
    }

    #[test]
    fn infinity_is_top() {
        assert!(TwoAdicOrder::Infinity > TwoAdicOrder::Finite(i64::MAX));
        assert!(TwoAdicOrder::Finite(-5) < TwoAdicOrder::Finite(3));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(q("0").midpoint(&q("1")), q("1/2"));
        assert_eq!(&q("1/3") + &q("1/2"), q("5/6"));
        assert_eq!(q("-2").pow(3), q("-8"));
        assert_eq!(q("3/4").mul_int(-2), q("-3/2"));
        assert_eq!(-q("5/7"), q("-5/7"));
        assert_eq!(Rational::pow2(-3), q("1/8"));
        assert_eq!(Rational::pow2(4), q("16"));
        assert_eq!(Rational::pow2(0), Rational::one());
    }

    #[test]
    fn text_form() {
        assert_eq!(q("-3/8").to_string(), "-3/8");
        assert_eq!(q("10/2").to_string(), "5");
        assert_eq!(q("4/-6").to_string(), "-2/3");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("1/2/3".parse::<Rational>().is_err());
    }

    #[test]
    fn cmp_small_matches_big() {
        for (p, d, s) in [(1, 2, "1/3"), (-1, 3, "-1/3"), (5, 1, "9/2"), (0, 1, "0")] {
            assert_eq!(cmp_small(p, d, &q(s)), Rational::new(p, d).unwrap().cmp(&q(s)));
        }
    }

    #[test]
    fn two_adic_integer_membership() {
        assert!(q("5/3").is_two_adic_integer());
        assert!(!q("5/6").is_two_adic_integer());
        assert!(q("0").is_two_adic_integer());
    }
}
