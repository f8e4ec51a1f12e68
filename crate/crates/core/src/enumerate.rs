//! Canonical enumerations of Q, Z and the odd-denominator rationals.
//!
//! Rationals are listed by increasing height `|p| + q`, then by numerator
//! ascending, reduced fractions only. Zero (height 1) comes first:
//! `0, -1, 1, -2, -1/2, 1/2, 2, -3, -1/3, 1/3, 3, ...`
//!
//! The integer and odd-denominator enumerations are exactly this sequence
//! filtered, so every built-in enumeration is a restriction of one order.

use num_integer::Integer;

use crate::rational::Rational;

/// Reduced fractions `(p, q)` with `q > 0` in canonical order.
#[derive(Clone, Debug)]
pub struct RationalPairs {
    height: i64,
    numer: i64,
}

impl RationalPairs {
    pub fn new() -> Self {
        RationalPairs { height: 1, numer: 0 }
    }
}

impl Default for RationalPairs {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for RationalPairs {
    type Item = (i64, i64);

    fn next(&mut self) -> Option<(i64, i64)> {
        loop {
            if self.numer > self.height - 1 {
                self.height += 1;
                self.numer = -(self.height - 1);
            }
            let p = self.numer;
            self.numer += 1;
            let q = self.height - p.abs();
            // gcd(0, q) = q, so zero only survives at height 1.
            if q >= 1 && p.abs().gcd(&q) == 1 {
                return Some((p, q));
            }
        }
    }
}

/// The canonical enumeration of Q.
pub fn rationals() -> impl Iterator<Item = Rational> + Clone {
    RationalPairs::new().map(|(p, q)| Rational::new(p, q).expect("q >= 1"))
}

/// The canonical enumeration of Z: `0, -1, 1, -2, 2, ...`, which is the
/// restriction of the Q enumeration to integers.
#[derive(Clone, Debug, Default)]
pub struct IntegerEnumeration {
    next: i64,
}

impl Iterator for IntegerEnumeration {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        let out = self.next;
        self.next = if out > 0 { -out - 1 } else if out < 0 { -out } else { -1 };
        Some(out)
    }
}

/// The canonical enumeration of Z_(2), the rationals with odd denominator.
pub fn two_adic_integers() -> impl Iterator<Item = Rational> + Clone {
    RationalPairs::new()
        .filter(|&(_, q)| q % 2 == 1)
        .map(|(p, q)| Rational::new(p, q).expect("q >= 1"))
}
