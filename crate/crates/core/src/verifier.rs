//! Ground-truth checks for the chaotic and binary properties.
//!
//! A map is *chaotic* when no `a, b, c` satisfy `f(a) ≺ f(b) ≺ f(c)` with
//! `b - a = c - b`, and *binary* when no such triple has
//! `ord2(b - a) = ord2(c - b)`. Binary implies chaotic.
//!
//! Both checks work on the domain listed in image order. Rationals are first
//! scaled by the lcm of their denominators so the inner loops run on
//! integers (`i128` when they fit): scaling by `L` shifts every `ord2` by
//! `ord2(L)` and preserves midpoints, so neither property changes.
//!
//! Witnesses are the lexicographically first `(i, j, k)` in image-position
//! order, regardless of [`Strategy`].

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::map::FiniteOrderedMap;
use crate::rational::{common_denominator, Rational};

/// A monotone triple: `f(a) ≺ f(b) ≺ f(c)`, with image positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub positions: [usize; 3],
}

impl Triple {
    fn at(seq: &[Rational], (i, j, k): (usize, usize, usize)) -> Self {
        Triple {
            a: seq[i].clone(),
            b: seq[j].clone(),
            c: seq[k].clone(),
            positions: [i, j, k],
        }
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}\t{}\t{}", self.a, self.b, self.c)
    }
}

/// Classification of a finite map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Binary,
    /// Chaotic, with a binary violation.
    ChaoticOnly(Triple),
    /// Not chaotic, with a monotone 3-AP.
    NotChaotic(Triple),
}

/// Whether row scans are spread over the rayon pool. Without the `parallel`
/// feature both variants run sequentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

trait Scaled: Sync {
    type Key: Hash + Eq + Send + Sync;
    fn len(&self) -> usize;
    /// Trailing zeros of `x_i - x_j`, `i != j`.
    fn diff_tz(&self, i: usize, j: usize) -> u64;
    fn key(&self, i: usize) -> Self::Key;
    /// `(x_i + x_k) / 2` when it is an integer.
    fn half_sum(&self, i: usize, k: usize) -> Option<Self::Key>;
}

struct Small(Vec<i128>);
struct Big(Vec<BigInt>);

impl Scaled for Small {
    type Key = i128;
    fn len(&self) -> usize {
        self.0.len()
    }
    fn diff_tz(&self, i: usize, j: usize) -> u64 {
        (self.0[i] - self.0[j]).trailing_zeros() as u64
    }
    fn key(&self, i: usize) -> i128 {
        self.0[i]
    }
    fn half_sum(&self, i: usize, k: usize) -> Option<i128> {
        let s = self.0[i] + self.0[k];
        (s & 1 == 0).then_some(s >> 1)
    }
}

impl Scaled for Big {
    type Key = BigInt;
    fn len(&self) -> usize {
        self.0.len()
    }
    fn diff_tz(&self, i: usize, j: usize) -> u64 {
        (&self.0[i] - &self.0[j]).trailing_zeros().expect("distinct values")
    }
    fn key(&self, i: usize) -> BigInt {
        self.0[i].clone()
    }
    fn half_sum(&self, i: usize, k: usize) -> Option<BigInt> {
        let s = &self.0[i] + &self.0[k];
        s.is_even().then(|| s >> 1)
    }
}

enum Lattice {
    Small(Small),
    Big(Big),
}

fn scale(seq: &[Rational]) -> Lattice {
    let (ints, _) = common_denominator(seq);
    let limit = BigInt::one() << 125u32;
    if ints.iter().all(|x| x.abs() < limit) {
        Lattice::Small(Small(ints.iter().map(|x| x.to_i128().expect("bounded")).collect()))
    } else {
        Lattice::Big(Big(ints))
    }
}

fn rows<T, F>(n: usize, strategy: Strategy, f: F) -> Vec<Option<T>>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

fn first_row<T, F>(n: usize, strategy: Strategy, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().find_map_first(f)
        }
        _ => (0..n).find_map(f),
    }
}

fn monotone_3ap<S: Scaled>(s: &S, strategy: Strategy) -> Option<(usize, usize, usize)> {
    let n = s.len();
    let pos: HashMap<S::Key, usize> = (0..n).map(|i| (s.key(i), i)).collect();
    first_row(n, strategy, |i| {
        (i + 2..n)
            .filter_map(|k| {
                let j = *pos.get(&s.half_sum(i, k)?)?;
                (i < j && j < k).then_some((j, k))
            })
            .min()
            .map(|(j, k)| (i, j, k))
    })
}

fn binary_violation<S: Scaled>(s: &S, strategy: Strategy) -> Option<(usize, usize, usize)> {
    let n = s.len();
    rows(n, strategy, |j| {
        let mut left: HashMap<u64, usize> = HashMap::new();
        for i in 0..j {
            left.entry(s.diff_tz(j, i)).or_insert(i);
        }
        if left.is_empty() {
            return None;
        }
        let mut best: Option<(usize, usize)> = None;
        for k in j + 1..n {
            if let Some(&i) = left.get(&s.diff_tz(k, j)) {
                // k ascends, so the first k for a given i is the smallest.
                if best.is_none_or(|(bi, _)| i < bi) {
                    best = Some((i, k));
                }
            }
        }
        best.map(|(i, k)| (i, j, k))
    })
    .into_iter()
    .flatten()
    .min()
}

/// Monotone 3-AP in a domain listed in image order.
pub fn find_monotone_3ap_in(seq: &[Rational], strategy: Strategy) -> Option<Triple> {
    if seq.len() < 3 {
        return None;
    }
    let hit = match scale(seq) {
        Lattice::Small(s) => monotone_3ap(&s, strategy),
        Lattice::Big(s) => monotone_3ap(&s, strategy),
    };
    hit.map(|t| Triple::at(seq, t))
}

/// Binary violation in a domain listed in image order.
pub fn find_binary_violation_in(seq: &[Rational], strategy: Strategy) -> Option<Triple> {
    if seq.len() < 3 {
        return None;
    }
    let hit = match scale(seq) {
        Lattice::Small(s) => binary_violation(&s, strategy),
        Lattice::Big(s) => binary_violation(&s, strategy),
    };
    hit.map(|t| Triple::at(seq, t))
}

pub fn find_monotone_3ap(m: &FiniteOrderedMap) -> Option<Triple> {
    find_monotone_3ap_in(&m.domain_sequence(), Strategy::default())
}

pub fn find_binary_violation(m: &FiniteOrderedMap) -> Option<Triple> {
    find_binary_violation_in(&m.domain_sequence(), Strategy::default())
}

pub fn is_chaotic(m: &FiniteOrderedMap) -> bool {
    find_monotone_3ap(m).is_none()
}

pub fn is_binary(m: &FiniteOrderedMap) -> bool {
    find_binary_violation(m).is_none()
}

pub fn classify_sequence(seq: &[Rational], strategy: Strategy) -> Verdict {
    match find_binary_violation_in(seq, strategy) {
        None => Verdict::Binary,
        Some(violation) => match find_monotone_3ap_in(seq, strategy) {
            None => Verdict::ChaoticOnly(violation),
            Some(ap) => Verdict::NotChaotic(ap),
        },
    }
}

pub fn classify(m: &FiniteOrderedMap) -> Verdict {
    classify_sequence(&m.domain_sequence(), Strategy::default())
}

/// If the domain holds the preimages `a` of the largest image and `b` of the
/// smallest, together with their midpoint `c`, then `(b, c, a)` is a monotone
/// 3-AP. A map on all of Q into an order with both a maximum and a minimum
/// always contains one.
pub fn check_maxmin_obstruction(m: &FiniteOrderedMap) -> Option<Triple> {
    let seq = m.domain_sequence();
    if seq.len() < 3 {
        return None;
    }
    let last = seq.len() - 1;
    let mid = seq[0].midpoint(&seq[last]);
    let j = seq.iter().position(|d| *d == mid)?;
    Some(Triple::at(&seq, (0, j, last)))
}
