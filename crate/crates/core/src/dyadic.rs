//! Generators with prescribed 2-adic orders and their subset sums.
//!
//! A *q-sequence* has `ord2(q_n) = n`; every odd-denominator rational is then
//! pinned down digit by digit by a subset of it, like binary expansion. The
//! *r-sequence* interleaves the `q_n` with the powers `2^-1, 2^-2, ...` so
//! its subset sums `S_n` eventually cover all of Q while alternating between
//! "new generator is 2-adically coarser than every difference in `S_n`"
//! (even `n`) and "finer than every difference" (odd `n`).

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::enumerate;
use crate::error::Error;
use crate::rational::{Rational, TwoAdicOrder};

/// Default number of `h` values the greedy search may inspect per term.
pub const DEFAULT_CANDIDATE_CAP: usize = 100_000;

/// Sorted index set.
pub type Subset = Vec<usize>;

fn check_q_profile(qs: &[Rational]) -> Result<(), Error> {
    for (i, q) in qs.iter().enumerate() {
        if q.ord2() != TwoAdicOrder::Finite(i as i64) {
            return Err(Error::Precondition(format!("ord2(q_{i}) = {} but must be {i}", q.ord2())));
        }
    }
    Ok(())
}

/// The unique `A ⊆ {0..n-1}` with `ord2(q - Σ_{i∈A} q_i) ≥ n`, built one
/// digit at a time: index `i` joins `A` exactly when the running residue has
/// 2-adic order `i`.
pub fn binary_representation(q: &Rational, qs: &[Rational]) -> Result<Subset, Error> {
    if !q.is_two_adic_integer() {
        return Err(Error::Precondition(format!("{q} has even denominator")));
    }
    check_q_profile(qs)?;
    Ok(representation_unchecked(q, qs).0)
}

/// Digits and final residue; assumes the profile is valid.
fn representation_unchecked(q: &Rational, qs: &[Rational]) -> (Subset, Rational) {
    let mut residue = q.clone();
    let mut digits = Vec::new();
    for (i, qi) in qs.iter().enumerate() {
        if residue.ord2() == TwoAdicOrder::Finite(i as i64) {
            residue = &residue - qi;
            digits.push(i);
        }
    }
    (digits, residue)
}

/// One step of the greedy construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QTerm {
    pub value: Rational,
    /// Index `l_n` into `h`.
    pub source_index: usize,
    /// `A` with `q_n = h(l_n) - Σ_{i∈A} q_i`.
    pub subset: Subset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QSequence {
    pub terms: Vec<QTerm>,
}

impl QSequence {
    pub fn values(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.value.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Greedy q-sequence over an enumeration `h` of Z_(2): `q_n` comes from the
/// smallest `l` for which some `A ⊆ {0..n-1}` gives
/// `ord2(h(l) - Σ_{i∈A} q_i) = n`. That `A` can only be the binary
/// representation of `h(l)` over the current prefix, so the test is whether
/// its residue has order exactly `n`.
pub fn build_q_sequence<I>(h: I, count: usize, candidate_cap: usize) -> Result<QSequence, Error>
where
    I: IntoIterator<Item = Rational>,
{
    let mut h = h.into_iter();
    let mut seen: Vec<Rational> = Vec::new();
    let mut terms: Vec<QTerm> = Vec::with_capacity(count);
    let mut qs: Vec<Rational> = Vec::with_capacity(count);
    for n in 0..count {
        let target = TwoAdicOrder::Finite(n as i64);
        let mut chosen = None;
        for l in 0..candidate_cap {
            while seen.len() <= l {
                match h.next() {
                    Some(v) => seen.push(v),
                    None => return Err(Error::CandidateCap { index: n, cap: seen.len() }),
                }
            }
            let candidate = &seen[l];
            if !candidate.is_two_adic_integer() {
                return Err(Error::Precondition(format!("h({l}) = {candidate} is not in Z_(2)")));
            }
            let (subset, residue) = representation_unchecked(candidate, &qs);
            if residue.ord2() == target {
                chosen = Some(QTerm { value: residue, source_index: l, subset });
                break;
            }
        }
        let term = chosen.ok_or(Error::CandidateCap { index: n, cap: candidate_cap })?;
        qs.push(term.value.clone());
        terms.push(term);
    }
    Ok(QSequence { terms })
}

/// The q-sequence over the canonical enumeration of Z_(2).
pub fn canonical_q_sequence(count: usize) -> Result<QSequence, Error> {
    build_q_sequence(enumerate::two_adic_integers(), count, DEFAULT_CANDIDATE_CAP)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RSequence {
    pub terms: Vec<Rational>,
}

impl RSequence {
    /// `r_n = q_{n/2}` for even `n`, `2^{-(n+1)/2}` for odd `n`.
    pub fn interleave(qs: &[Rational], count: usize) -> Result<Self, Error> {
        if count > 2 * qs.len() {
            return Err(Error::Precondition(format!(
                "{count} r-terms need {} q-terms, have {}",
                count.div_ceil(2),
                qs.len()
            )));
        }
        let terms = (0..count)
            .map(|n| {
                if n % 2 == 0 {
                    qs[n / 2].clone()
                } else {
                    Rational::pow2(-(n as i64 + 1) / 2)
                }
            })
            .collect();
        Ok(RSequence { terms })
    }

    /// `r_n = 2^n`.
    pub fn powers_of_two(count: usize) -> Self {
        RSequence { terms: (0..count).map(|n| Rational::pow2(n as i64)).collect() }
    }

    /// `r_n = (-2)^n`.
    pub fn powers_of_minus_two(count: usize) -> Self {
        RSequence {
            terms: (0..count).map(|n| Rational::from_integer(-2).pow(n as i32)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn prefix(&self, n: usize) -> &[Rational] {
        &self.terms[..n]
    }

    /// `S_n` for `n ≤ len`.
    pub fn subset_sums(&self, n: usize) -> Result<SubsetSumSet, Error> {
        SubsetSumSet::new(self.terms[..n].to_vec())
    }
}

pub fn build_r_sequence(qs: &QSequence, count: usize) -> Result<RSequence, Error> {
    RSequence::interleave(&qs.values(), count)
}

/// The canonical r-sequence of length `count`.
pub fn canonical_r_sequence(count: usize) -> Result<RSequence, Error> {
    let qs = canonical_q_sequence(count.div_ceil(2))?;
    build_r_sequence(&qs, count)
}

/// `S_n = {Σ_{i∈A} r_i | A ⊆ {0..n-1}}`, each element tagged by its subset
/// as a bitmask. Element `k` has mask `k`.
#[derive(Clone, Debug)]
pub struct SubsetSumSet {
    generators: Vec<Rational>,
    elements: Vec<Rational>,
}

impl SubsetSumSet {
    /// Fails if two subsets share a sum.
    pub fn new(generators: Vec<Rational>) -> Result<Self, Error> {
        if generators.len() >= usize::BITS as usize - 1 {
            return Err(Error::Precondition("too many generators".into()));
        }
        let mut elements = vec![Rational::zero()];
        for g in &generators {
            let shifted: Vec<Rational> = elements.iter().map(|e| e + g).collect();
            elements.extend(shifted);
        }
        let distinct: HashSet<&Rational> = elements.iter().collect();
        if distinct.len() != elements.len() {
            return Err(Error::Precondition("subset sums collide".into()));
        }
        Ok(SubsetSumSet { generators, elements })
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    pub fn elements(&self) -> &[Rational] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn subset_of(&self, k: usize) -> Subset {
        (0..self.generators.len()).filter(|i| k >> i & 1 == 1).collect()
    }

    pub fn as_set(&self) -> BTreeSet<Rational> {
        self.elements.iter().cloned().collect()
    }
}

/// `r = Σ_{i∈A} r_i`, or a request for more generators.
///
/// The dyadic tail is peeled first: while `ord2(residue) = -j < 0`, subtract
/// `2^-j` (odd index `2j - 1`); each step raises `ord2`, so this stops after
/// at most `j` steps at an odd-denominator residue, which is then expanded
/// over the q-terms at even indices. The expansion must end with residue 0.
pub fn decompose(r: &Rational, rs: &RSequence) -> Result<Subset, Error> {
    let need_more = || Error::NeedLongerPrefix(r.clone());
    let mut residue = r.clone();
    let mut subset = Vec::new();
    while let TwoAdicOrder::Finite(v) = residue.ord2() {
        if v >= 0 {
            break;
        }
        let j = -v;
        let index = (2 * j - 1) as usize;
        if index >= rs.len() {
            return Err(need_more());
        }
        residue = &residue - &Rational::pow2(v);
        subset.push(index);
    }
    let qs: Vec<Rational> = rs.terms.iter().step_by(2).cloned().collect();
    check_q_profile(&qs)?;
    let (digits, rest) = representation_unchecked(&residue, &qs);
    if !rest.is_zero() {
        return Err(need_more());
    }
    subset.extend(digits.into_iter().map(|i| 2 * i));
    subset.sort_unstable();
    Ok(subset)
}

pub fn sum_of(subset: &[usize], rs: &RSequence) -> Rational {
    subset.iter().map(|&i| &rs.terms[i]).sum()
}

/// Which hypotheses of the shift lemma hold for `(S, r)`, and whether each
/// corresponding conclusion was confirmed over `S ∪ (S + r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftReport {
    /// `ord2(a - b) ≠ ord2(r)` for all `a, b ∈ S`.
    pub all_differ: bool,
    /// `ord2(a - b) < ord2(r)` for distinct `a, b ∈ S`.
    pub all_below: bool,
    /// `ord2(a - b) > ord2(r)` for all `a, b ∈ S`.
    pub all_above: bool,
    /// `S ∩ (S + r) = ∅`, checked when `all_differ`.
    pub disjoint: Option<bool>,
    /// Conclusion for `all_below`: `ord2 ≤ ord2(r)`, equal iff `a - b = ±r`.
    pub below_conclusion: Option<bool>,
    /// Conclusion for `all_above`: `ord2 ≥ ord2(r)`, equal iff the pair
    /// straddles `S` and `S + r`.
    pub above_conclusion: Option<bool>,
    /// First pair contradicting a checked conclusion.
    pub witness: Option<(Rational, Rational)>,
}

impl ShiftReport {
    pub fn passed(&self) -> bool {
        self.disjoint != Some(false)
            && self.below_conclusion != Some(false)
            && self.above_conclusion != Some(false)
    }
}

/// Exhaustive check of the shift lemma on a finite `S` and `r ≠ 0`.
pub fn check_shift_lemma(s: &[Rational], r: &Rational) -> Result<ShiftReport, Error> {
    if r.is_zero() {
        return Err(Error::Precondition("r must be nonzero".into()));
    }
    let v = r.ord2();
    let pairs = || s.iter().flat_map(|a| s.iter().map(move |b| (a, b)));
    let all_differ = pairs().all(|(a, b)| (a - b).ord2() != v);
    let all_below = pairs().filter(|(a, b)| a != b).all(|(a, b)| (a - b).ord2() < v);
    let all_above = pairs().all(|(a, b)| (a - b).ord2() > v);

    let base: HashSet<&Rational> = s.iter().collect();
    let shifted: Vec<Rational> = s.iter().map(|a| a + r).collect();
    let shifted_set: HashSet<&Rational> = shifted.iter().collect();
    let mut union: Vec<Rational> = s.to_vec();
    union.extend(shifted.iter().filter(|x| !base.contains(x)).cloned());

    let mut witness = None;
    let disjoint = all_differ.then(|| {
        let hit = shifted.iter().find(|x| base.contains(x));
        if let Some(x) = hit {
            witness.get_or_insert((x - r, x.clone()));
        }
        hit.is_none()
    });
    let neg_r = -r;
    let mut scan = |rule: &dyn Fn(&Rational, &Rational, TwoAdicOrder) -> bool| {
        for a in &union {
            for b in &union {
                if a != b && !rule(a, b, (a - b).ord2()) {
                    witness.get_or_insert((a.clone(), b.clone()));
                    return false;
                }
            }
        }
        true
    };
    let below_conclusion = all_below.then(|| {
        scan(&|a, b, o| {
            let d = a - b;
            o <= v && ((o == v) == (d == *r || d == neg_r))
        })
    });
    let straddles = |a: &Rational, b: &Rational| {
        (base.contains(a) && shifted_set.contains(b)) || (shifted_set.contains(a) && base.contains(b))
    };
    let above_conclusion = all_above.then(|| scan(&|a, b, o| o >= v && ((o == v) == straddles(a, b))));
    Ok(ShiftReport { all_differ, all_below, all_above, disjoint, below_conclusion, above_conclusion, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn qs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn binary_digits_of_thirteen() {
        assert_eq!(binary_representation(&q("13"), &qs(&["1", "2", "4", "8"])).unwrap(), vec![0, 2, 3]);
        assert_eq!(binary_representation(&q("0"), &qs(&["1", "2", "4", "8"])).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn representation_preconditions() {
        assert!(binary_representation(&q("1/2"), &qs(&["1"])).is_err());
        assert!(binary_representation(&q("1"), &qs(&["1", "3"])).is_err());
    }

    #[test]
    fn naturals_as_h_give_powers_of_two() {
        let h = (0..).map(Rational::from_integer);
        let seq = build_q_sequence(h, 6, 1000).unwrap();
        assert_eq!(seq.terms[0], QTerm { value: q("1"), source_index: 1, subset: vec![] });
        let vals: Vec<String> = seq.values().iter().map(|v| v.to_string()).collect();
        assert_eq!(vals, ["1", "2", "4", "8", "16", "32"]);
    }

    #[test]
    fn canonical_q_profile() {
        let seq = canonical_q_sequence(8).unwrap();
        for (n, t) in seq.terms.iter().enumerate() {
            assert_eq!(t.value.ord2(), TwoAdicOrder::Finite(n as i64));
        }
        assert_eq!(seq, canonical_q_sequence(8).unwrap());
    }

    #[test]
    fn cap_overflow_is_reported() {
        let h = std::iter::repeat(Rational::zero());
        assert_eq!(build_q_sequence(h, 1, 10), Err(Error::CandidateCap { index: 0, cap: 10 }));
        let finite = vec![Rational::zero()];
        assert!(matches!(build_q_sequence(finite, 1, 10), Err(Error::CandidateCap { .. })));
    }

    #[test]
    fn r_sequence_from_powers() {
        let seq = RSequence::interleave(&qs(&["1", "2", "4"]), 6).unwrap();
        let vals: Vec<String> = seq.terms.iter().map(|v| v.to_string()).collect();
        assert_eq!(vals, ["1", "1/2", "2", "1/4", "4", "1/8"]);
        assert!(RSequence::interleave(&qs(&["1", "2", "4"]), 7).is_err());
    }

    #[test]
    fn integer_generators() {
        let s = RSequence::powers_of_minus_two(3).subset_sums(3).unwrap();
        let mut v: Vec<i64> = s.elements().iter().map(|e| e.to_string().parse().unwrap()).collect();
        v.sort();
        assert_eq!(v, [-2, -1, 0, 1, 2, 3, 4, 5]);
        assert_eq!(s.subset_of(5), vec![0, 2]);
        assert_eq!(s.elements()[5], q("5"));
    }

    #[test]
    fn colliding_sums_rejected() {
        assert!(SubsetSumSet::new(qs(&["1", "1"])).is_err());
    }

    #[test]
    fn decompose_five_sixths() {
        let rs = canonical_r_sequence(12).unwrap();
        let subset = decompose(&q("5/6"), &rs).unwrap();
        assert!(subset.contains(&1));
        assert_eq!(sum_of(&subset, &rs), q("5/6"));
        assert_eq!(decompose(&q("0"), &rs).unwrap(), Vec::<usize>::new());
        // the Z_(2) part is 1/3
        let z_part: Rational = subset.iter().filter(|&&i| i % 2 == 0).map(|&i| &rs.terms[i]).sum();
        assert_eq!(z_part, q("1/3"));
    }

    #[test]
    fn decompose_asks_for_more() {
        let rs = canonical_r_sequence(2).unwrap();
        assert_eq!(decompose(&q("1/8"), &rs), Err(Error::NeedLongerPrefix(q("1/8"))));
    }

    #[test]
    fn shift_lemma_cases() {
        let rep = check_shift_lemma(&qs(&["0", "1", "2", "3"]), &q("8")).unwrap();
        assert!(rep.all_below && rep.all_differ && !rep.all_above);
        assert_eq!(rep.below_conclusion, Some(true));
        assert_eq!(rep.disjoint, Some(true));
        assert!(rep.passed());

        let rep = check_shift_lemma(&qs(&["0", "8"]), &q("1")).unwrap();
        assert!(rep.all_above && !rep.all_below);
        assert_eq!(rep.above_conclusion, Some(true));

        let rep = check_shift_lemma(&qs(&["0"]), &q("5/4")).unwrap();
        assert!(rep.all_differ && rep.all_below && rep.all_above && rep.passed());

        // S = {0, 1}, r = 1: no hypothesis holds, nothing to check
        let rep = check_shift_lemma(&qs(&["0", "1"]), &q("1")).unwrap();
        assert!(!rep.all_differ && !rep.all_below && !rep.all_above);
        assert_eq!((rep.disjoint, rep.below_conclusion, rep.above_conclusion), (None, None, None));
    }
}
