//! Orderings of N, Z and Q without monotone three-term arithmetic
//! progressions.
//!
//! A bijection `f: S → X` into a totally ordered set is *chaotic* when no
//! `a, b, c` with `b - a = c - b` have `f(a) ≺ f(b) ≺ f(c)`, and *binary*
//! when the same holds with the weaker condition `ord2(b - a) = ord2(c - b)`.
//! For `S ∈ {N, Z, Q}` the two notions agree, and a chaotic bijection onto a
//! countable `X` exists exactly when `X` has no isolated points (plus, for Q,
//! when `X` lacks a maximum or a minimum).
//!
//! This crate builds finite prefixes of such bijections step by step and
//! checks them:
//!
//! - [`rational`]: exact rationals and `ord2`.
//! - [`order`]: countable orders given by an enumeration and a comparator,
//!   with budgeted searches for fresh points.
//! - [`map`], [`verifier`]: finite maps and the chaotic/binary checks.
//! - [`dyadic`]: generator sequences whose subset sums exhaust Q.
//! - [`construct`]: the extension steps and the prefix constructions.
//! - [`onlyif`]: finite evidence for the necessity direction.
//! - [`emit`]: TSV / JSON-lines serialization of maps.

#![allow(clippy::result_large_err)] // errors carry exact interval bounds

pub mod construct;
pub mod dyadic;
pub mod emit;
pub mod enumerate;
pub mod error;
pub mod map;
pub mod onlyif;
pub mod order;
pub mod rational;
pub mod verifier;

pub use error::Error;
pub use map::{Entry, FiniteOrderedMap};
pub use order::{BuiltinOrder, CountableOrder, OrderPoint, SearchBudget};
pub use rational::{Rational, TwoAdicOrder};
