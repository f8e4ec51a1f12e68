//! Step-by-step construction of binary bijections from N, Z and Q.
//!
//! Each step doubles the domain, `S_{n+1} = S_n ∪ (S_n + r_n)`, and places
//! the new points in `X` so the map stays binary:
//!
//! - [`extend_add_odd`] applies when `r_n` is 2-adically coarser than every
//!   difference in `S_n`. Listing `S` by image as `a_1, ..., a_m`, the image
//!   of `a_i + r` goes strictly between `f(a_{i-1})` (and the previous new
//!   image) and `f(a_{i+1})`, avoiding `f(a_i)`. A chosen target point is
//!   used at the first `i` where it fits, which is how coverage of `X` is
//!   forced.
//! - [`extend_add_outside`] applies when `r_n` is finer than every
//!   difference; all new images go above the old ones, in increasing order.
//!
//! For N and Z (`r_n = 2^n`, `(-2)^n`) every step is an odd-add step forcing
//! `g(k)` for the least uncovered `k`. For Q the r-sequence alternates and
//! only even steps force coverage. Points are otherwise chosen with the least
//! enumeration index, so every run is deterministic.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::dyadic::{self, RSequence};
use crate::error::Error;
use crate::map::{Entry, FiniteOrderedMap};
use crate::order::{CountableOrder, OrderPoint, SearchBudget};
use crate::rational::{common_denominator, Rational, TwoAdicOrder};
use crate::verifier;

pub const MAX_DEPTH_NZ: usize = 14;
pub const MAX_DEPTH_Q: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Source {
    N,
    Z,
    Q,
}

impl Source {
    pub fn max_depth(self) -> usize {
        match self {
            Source::N | Source::Z => MAX_DEPTH_NZ,
            Source::Q => MAX_DEPTH_Q,
        }
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "N" | "n" | "ℕ" => Ok(Source::N),
            "Z" | "z" | "ℤ" => Ok(Source::Z),
            "Q" | "q" | "ℚ" => Ok(Source::Q),
            other => Err(Error::Precondition(format!("unknown source {other:?}, expected N, Z or Q"))),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::N => "N",
            Source::Z => "Z",
            Source::Q => "Q",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    AddOdd,
    AddOutside,
}

/// Image chosen for one new domain point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub domain: Rational,
    pub image: OrderPoint,
    /// Enumeration index of the image, when known.
    pub enumeration_index: Option<usize>,
    /// Whether this was the forced coverage target.
    pub target: bool,
}

/// A coverage target `g(index)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Target {
    pub index: usize,
    pub point: OrderPoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    /// `n` in `f_n → f_{n+1}`.
    pub step: usize,
    pub r: Rational,
    pub rule: Rule,
    pub target: Option<Target>,
    pub placements: Vec<Placement>,
    /// Least uncovered enumeration index after the step.
    pub cursor: usize,
}

fn two_adic_gap(s: &[Rational], r: &Rational) -> Result<(Vec<BigInt>, i64), Error> {
    let TwoAdicOrder::Finite(v) = r.ord2() else {
        return Err(Error::Precondition("r must be nonzero".into()));
    };
    let (ints, lcm) = common_denominator(s);
    let shift = lcm.trailing_zeros().unwrap_or(0) as i64;
    Ok((ints, v + shift))
}

/// First distinct pair with `ord2(a - b) ≥ ord2(r)`, if any. Scaled to
/// integers over the common denominator `L`, the hypothesis says the values
/// are pairwise incongruent modulo `2^(ord2 r + ord2 L)`.
fn pair_not_below(s: &[Rational], r: &Rational) -> Result<Option<(Rational, Rational)>, Error> {
    if s.len() < 2 {
        return Ok(None);
    }
    let (ints, w) = two_adic_gap(s, r)?;
    if w <= 0 {
        return Ok(Some((s[0].clone(), s[1].clone())));
    }
    let modulus = BigInt::one() << (w as u64);
    let mut seen = std::collections::HashMap::with_capacity(ints.len());
    for (i, a) in ints.iter().enumerate() {
        if let Some(j) = seen.insert(a.mod_floor(&modulus), i) {
            return Ok(Some((s[j].clone(), s[i].clone())));
        }
    }
    Ok(None)
}

/// First pair with `ord2(a - b) ≤ ord2(r)`, if any: the hypothesis says all
/// scaled values are congruent modulo `2^(ord2 r + ord2 L + 1)`.
fn pair_not_above(s: &[Rational], r: &Rational) -> Result<Option<(Rational, Rational)>, Error> {
    if s.len() < 2 {
        return Ok(None);
    }
    let (ints, w) = two_adic_gap(s, r)?;
    if w < 0 {
        return Ok(None);
    }
    let modulus = BigInt::one() << ((w + 1) as u64);
    let base = ints[0].mod_floor(&modulus);
    Ok(ints
        .iter()
        .position(|a| a.mod_floor(&modulus) != base)
        .map(|i| (s[0].clone(), s[i].clone())))
}

fn strictly_inside(
    order: &CountableOrder,
    p: &OrderPoint,
    lower: Option<&OrderPoint>,
    upper: Option<&OrderPoint>,
) -> bool {
    lower.is_none_or(|l| order.less(l, p)) && upper.is_none_or(|u| order.less(p, u))
}

/// Extends a binary `f` on `S` to `S ∪ (S + r)` with `x` in the image.
///
/// Requires `ord2(a - b) < ord2(r)` for distinct `a, b ∈ S` and `x ∉ Im f`.
/// Fails with [`Error::BudgetExceeded`] when some interval that must hold a
/// fresh point has none within budget.
pub fn extend_add_odd(
    f: &FiniteOrderedMap,
    r: &Rational,
    x: &Target,
    budget: SearchBudget,
) -> Result<(FiniteOrderedMap, Vec<Placement>), Error> {
    if f.is_empty() {
        return Err(Error::Precondition("cannot extend an empty map".into()));
    }
    let domain = f.domain_sequence();
    if let Some((a, b)) = pair_not_below(&domain, r)? {
        return Err(Error::PreconditionOrd2 { a, b, r: r.clone() });
    }
    if f.image_set().contains(&x.point) {
        return Err(Error::Precondition(format!("target {} is already an image", x.point)));
    }
    let order = f.order().clone();
    let entries = f.entries();
    let m = entries.len();
    let mut placements: Vec<Placement> = Vec::with_capacity(m);
    let mut target_used = false;
    for i in 0..m {
        let lower = if i == 0 {
            None
        } else {
            let prev_old = &entries[i - 1].image;
            let prev_new = &placements[i - 1].image;
            Some(if order.less(prev_old, prev_new) { prev_new } else { prev_old })
        };
        let upper = entries.get(i + 1).map(|e| &e.image);
        let avoid = &entries[i].image;
        let domain = &entries[i].domain + r;
        if !target_used && x.point != *avoid && strictly_inside(&order, &x.point, lower, upper) {
            target_used = true;
            placements.push(Placement {
                domain,
                image: x.point.clone(),
                enumeration_index: Some(x.index),
                target: true,
            });
            continue;
        }
        let exclude: HashSet<OrderPoint> = [avoid.clone()].into();
        let found = order.find_first(lower, upper, &exclude, budget)?;
        placements.push(Placement {
            domain,
            image: found.point,
            enumeration_index: Some(found.index),
            target: false,
        });
    }
    if !target_used {
        return Err(Error::Internal(format!("target {} never fit an interval", x.point)));
    }
    let new_entries = placements
        .iter()
        .map(|p| Entry { domain: p.domain.clone(), image: p.image.clone() })
        .collect();
    Ok((f.extended(new_entries)?, placements))
}

/// Extends a binary `f` on `S` to `S ∪ (S + r)` by stacking the new images
/// above all old ones. Requires `ord2(a - b) > ord2(r)` for all `a, b ∈ S`;
/// fails with [`Error::BudgetExceeded`] when the order tops out.
pub fn extend_add_outside(
    f: &FiniteOrderedMap,
    r: &Rational,
    budget: SearchBudget,
) -> Result<(FiniteOrderedMap, Vec<Placement>), Error> {
    let Some(last) = f.entries().last() else {
        return Err(Error::Precondition("cannot extend an empty map".into()));
    };
    let domain = f.domain_sequence();
    if let Some((a, b)) = pair_not_above(&domain, r)? {
        return Err(Error::PreconditionOrd2 { a, b, r: r.clone() });
    }
    let order = f.order();
    let none = HashSet::new();
    let mut top = last.image.clone();
    let mut start = 0;
    let mut placements = Vec::with_capacity(f.len());
    for e in f.entries() {
        // Each new top is above the last, so earlier indices stay ruled out.
        let found = order.find_first_from(start, Some(&top), None, &none, budget)?;
        start = found.index + 1;
        top = found.point.clone();
        placements.push(Placement {
            domain: &e.domain + r,
            image: found.point,
            enumeration_index: Some(found.index),
            target: false,
        });
    }
    let new_entries = placements
        .iter()
        .map(|p| Entry { domain: p.domain.clone(), image: p.image.clone() })
        .collect();
    Ok((f.extended(new_entries)?, placements))
}

/// A construction in progress: `f_n` on `S_n` plus everything needed to
/// take the next step.
#[derive(Clone, Debug)]
pub struct ConstructionState {
    source: Source,
    order: Arc<CountableOrder>,
    /// `order`, or its reverse when running Q into an order with a maximum.
    working: Arc<CountableOrder>,
    map: FiniteOrderedMap,
    generators: RSequence,
    cursor: usize,
    budget: SearchBudget,
    audit: Vec<StepRecord>,
}

impl ConstructionState {
    /// `f_0(0) = g(0)`.
    pub fn start(source: Source, order: Arc<CountableOrder>, budget: SearchBudget) -> Result<Self, Error> {
        Self::start_with_limit(source, order, budget, source.max_depth())
    }

    fn start_with_limit(
        source: Source,
        order: Arc<CountableOrder>,
        budget: SearchBudget,
        max_depth: usize,
    ) -> Result<Self, Error> {
        let working = match source {
            Source::Q => {
                let declared = order.declared();
                match (&declared.maximum, &declared.minimum) {
                    (None, _) => order.clone(),
                    (Some(_), None) => Arc::new(order.reversed()),
                    (Some(_), Some(_)) => return Err(Error::OrderUnsuitable(order.name().to_string())),
                }
            }
            Source::N | Source::Z => order.clone(),
        };
        let generators = match source {
            Source::N => RSequence::powers_of_two(max_depth),
            Source::Z => RSequence::powers_of_minus_two(max_depth),
            Source::Q => dyadic::canonical_r_sequence(max_depth)?,
        };
        let first = Entry { domain: Rational::zero(), image: working.point(0) };
        let map = FiniteOrderedMap::from_entries(working.clone(), vec![first])?;
        let mut state = ConstructionState {
            source,
            order,
            working,
            map,
            generators,
            cursor: 0,
            budget,
            audit: Vec::new(),
        };
        state.advance_cursor();
        Ok(state)
    }

    fn advance_cursor(&mut self) {
        let images = self.map.image_set();
        while images.contains(&self.working.point(self.cursor)) {
            self.cursor += 1;
        }
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// `n`, so the domain is `S_n` with `2^n` points.
    pub fn depth(&self) -> usize {
        self.audit.len()
    }

    pub fn order(&self) -> &Arc<CountableOrder> {
        &self.order
    }

    /// Whether the steps ran against the reversed comparator.
    pub fn reversed(&self) -> bool {
        !Arc::ptr_eq(&self.order, &self.working)
    }

    /// `f_n`, sorted under the caller's order.
    pub fn map(&self) -> FiniteOrderedMap {
        if self.reversed() {
            self.map.reinterpret(self.order.clone()).expect("same graph")
        } else {
            self.map.clone()
        }
    }

    /// `r_0, ..., r_{n-1}`.
    pub fn generators(&self) -> &[Rational] {
        self.generators.prefix(self.depth())
    }

    /// Least `k` with `g(k) ∉ Im f_n`.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn budget(&self) -> SearchBudget {
        self.budget
    }

    pub fn audit(&self) -> &[StepRecord] {
        &self.audit
    }

    /// `f_n → f_{n+1}`.
    pub fn step(&mut self) -> Result<&StepRecord, Error> {
        let n = self.depth();
        if n >= self.generators.len() {
            return Err(Error::DepthLimit { depth: n + 1, limit: self.generators.len() });
        }
        let r = self.generators.terms[n].clone();
        let coverage_step = match self.source {
            Source::N | Source::Z => true,
            Source::Q => n.is_multiple_of(2),
        };
        let (map, placements, rule, target) = if coverage_step {
            let target = Target { index: self.cursor, point: self.working.point(self.cursor) };
            let (map, placements) = extend_add_odd(&self.map, &r, &target, self.budget)?;
            (map, placements, Rule::AddOdd, Some(target))
        } else {
            let (map, placements) = extend_add_outside(&self.map, &r, self.budget)?;
            (map, placements, Rule::AddOutside, None)
        };
        self.map = map;
        self.advance_cursor();
        self.audit.push(StepRecord { step: n, r, rule, target, placements, cursor: self.cursor });
        Ok(self.audit.last().expect("just pushed"))
    }

    /// Debug-time self check: binary, and domain equal to `S_n`.
    pub fn check(&self) -> Result<(), Error> {
        if let Some(t) = verifier::find_binary_violation(&self.map) {
            return Err(Error::Internal(format!("f_{} is not binary: {t}", self.depth())));
        }
        let expected = self.generators.subset_sums(self.depth())?.as_set();
        let actual: std::collections::BTreeSet<Rational> = self.map.domain_set().into_iter().collect();
        if expected != actual {
            return Err(Error::Internal(format!("domain of f_{} is not S_n", self.depth())));
        }
        Ok(())
    }
}

/// A construction that stopped early.
#[derive(Debug, Clone)]
pub struct ConstructError {
    /// The step `n` that failed, or `None` if the inputs were rejected.
    pub step: Option<usize>,
    pub error: Error,
    /// The last completed state.
    pub partial: Option<Box<ConstructionState>>,
}

impl fmt::Display for ConstructError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(n) => write!(f, "step {n} (building f_{}): {}", n + 1, self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for ConstructError {}

/// Runs `depth` steps from `f_0`.
pub fn construct_prefix(
    source: Source,
    order: Arc<CountableOrder>,
    depth: usize,
    budget: SearchBudget,
) -> Result<ConstructionState, ConstructError> {
    let limit = source.max_depth();
    let rejected = |error| ConstructError { step: None, error, partial: None };
    if depth > limit {
        return Err(rejected(Error::DepthLimit { depth, limit }));
    }
    let mut state =
        ConstructionState::start_with_limit(source, order, budget, depth.max(1)).map_err(rejected)?;
    for n in 0..depth {
        if let Err(error) = state.step() {
            return Err(ConstructError { step: Some(n), error, partial: Some(Box::new(state)) });
        }
    }
    Ok(state)
}
