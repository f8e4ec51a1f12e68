//! Finite evidence for the necessity direction.
//!
//! - [`check_odd_multiple_lemmas`]: along a progression `a + i·d` inside a
//!   binary map, `f(a) ≺ f(a+d)` iff `f(a) ≺ f(a+td)` for odd `t`, and iff
//!   `f(a+sd) ≺ f(a+td)` for even `s`, odd `t`. On finite binary maps both
//!   follow directly: even and odd multiples of `d` sit at equal 2-adic
//!   distance, so their images cannot interleave.
//! - [`extension_search`]: a chaotic but non-binary pattern on `{0..N-1}`
//!   cannot extend to a chaotic arrangement of all of N, so by compactness
//!   some finite `{0..M-1}` already admits no chaotic extension. The search
//!   finds that `M` by backtracking.
//! - [`negative_isolated_run`]: constructions into orders with isolated
//!   points run out of fresh points.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::construct::{construct_prefix, Source};
use crate::error::Error;
use crate::map::FiniteOrderedMap;
use crate::order::{CountableOrder, OrderPoint, SearchBudget};
use crate::rational::Rational;
use crate::verifier::{self, Strategy};

/// Default node budget per top-level branch of [`extension_search`].
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OddMultipleFailure {
    /// `f(a) ≺ f(a+d)` disagrees with `f(a) ≺ f(a+td)`.
    OddMultiple { t: usize },
    /// `f(a) ≺ f(a+d)` disagrees with `f(a+sd) ≺ f(a+td)`.
    EvenOdd { s: usize, t: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OddMultipleReport {
    pub checked: usize,
    pub failures: Vec<OddMultipleFailure>,
}

impl OddMultipleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: OddMultipleReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

/// Checks both equivalences for odd `t ≤ k` and even `s ≤ k`, given the
/// image positions of `a, a+d, ..., a+kd`.
fn check_progression(positions: &[usize]) -> OddMultipleReport {
    let k = positions.len() - 1;
    let mut report = OddMultipleReport::default();
    if k == 0 {
        return report;
    }
    let up = positions[0] < positions[1];
    for t in (1..=k).step_by(2) {
        report.checked += 1;
        if (positions[0] < positions[t]) != up {
            report.failures.push(OddMultipleFailure::OddMultiple { t });
        }
        for s in (0..=k).step_by(2) {
            report.checked += 1;
            if (positions[s] < positions[t]) != up {
                report.failures.push(OddMultipleFailure::EvenOdd { s, t });
            }
        }
    }
    report
}

/// Both odd-multiple equivalences along `a, a+d, ..., a+kd`.
pub fn check_odd_multiple_lemmas(
    m: &FiniteOrderedMap,
    a: &Rational,
    d: &Rational,
    k: usize,
) -> Result<OddMultipleReport, Error> {
    if d.is_zero() {
        return Err(Error::Precondition("d must be nonzero".into()));
    }
    let pos = m.positions();
    let mut positions = Vec::with_capacity(k + 1);
    let mut x = a.clone();
    for i in 0..=k {
        let p = pos
            .get(&x)
            .ok_or_else(|| Error::Precondition(format!("a + {i}d = {x} is not in the domain")))?;
        positions.push(*p);
        x = &x + d;
    }
    Ok(check_progression(&positions))
}

/// Runs [`check_odd_multiple_lemmas`] for every `a` and every `d = b - a`
/// (`b ≠ a` in the domain), each with the longest progression `a + i·d` the
/// domain contains.
pub fn sweep_odd_multiple_lemmas(m: &FiniteOrderedMap) -> OddMultipleReport {
    let pos = m.positions();
    let domain = m.domain_sequence();
    let per_start = |a: &Rational| {
        let mut report = OddMultipleReport::default();
        for b in &domain {
            if a == b {
                continue;
            }
            let d = b - a;
            let mut positions = vec![pos[a]];
            let mut x = b.clone();
            while let Some(&p) = pos.get(&x) {
                positions.push(p);
                x = &x + &d;
            }
            report.merge(check_progression(&positions));
        }
        report
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<OddMultipleReport> = {
        use rayon::prelude::*;
        domain.par_iter().map(per_start).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<OddMultipleReport> = domain.iter().map(per_start).collect();
    parts.into_iter().fold(OddMultipleReport::default(), |mut acc, r| {
        acc.merge(r);
        acc
    })
}

/// A permutation of `{0..N-1}` listed in ascending image order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialArrangement {
    values: Vec<usize>,
}

impl PartialArrangement {
    pub fn new(values: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; values.len()];
        for &v in &values {
            if v >= values.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Precondition(format!(
                    "{values:?} is not a permutation of 0..{}",
                    values.len()
                )));
            }
        }
        Ok(PartialArrangement { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_map(&self) -> FiniteOrderedMap {
        FiniteOrderedMap::from_ranking(self.values.iter().map(|&v| Rational::from_integer(v as i64)).collect())
            .expect("permutation")
    }
}

impl FromStr for PartialArrangement {
    type Err = Error;

    /// Comma-separated, e.g. `2,3,0,1`; empty string for the empty pattern.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return PartialArrangement::new(Vec::new());
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Precondition(format!("bad pattern {s:?}: {e}")))?;
        PartialArrangement::new(values)
    }
}

impl fmt::Display for PartialArrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    /// A chaotic arrangement of `{0..M-1}` inducing the pattern.
    Extended { arrangement: Vec<usize> },
    /// No chaotic arrangement of `{0..depth-1}` induces the pattern, while
    /// one of `{0..depth-2}` does.
    Blocked { depth: usize },
    /// A branch ran out of nodes first.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    /// Valid partial arrangements visited, over all branches searched.
    pub nodes: u64,
    /// `per_size[j]`: chaotic arrangements of `{0..j-1}` inducing the
    /// pattern that were visited. Exact counts when the outcome is blocked.
    pub per_size: Vec<u64>,
}

struct Branch {
    arrangement: Vec<usize>,
    pos: Vec<usize>,
    target: usize,
    nodes: u64,
    node_budget: u64,
    max_size: usize,
    per_size: Vec<u64>,
    limit_hit: bool,
}

impl Branch {
    /// Would putting `v = arrangement.len()` at `gap` close a monotone 3-AP?
    /// `v` is the largest value, so it can only end one: `(a, (a+v)/2, v)`.
    fn fits(&self, gap: usize) -> bool {
        let v = self.arrangement.len();
        let shifted = |p: usize| if p >= gap { p + 1 } else { p };
        let mut a = v % 2;
        while a + 2 <= v {
            let pa = shifted(self.pos[a]);
            let pb = shifted(self.pos[(a + v) / 2]);
            if (pa < pb) == (pb < gap) {
                return false;
            }
            a += 2;
        }
        true
    }

    fn insert(&mut self, gap: usize) {
        let v = self.arrangement.len();
        self.arrangement.insert(gap, v);
        self.pos.push(gap);
        for &w in &self.arrangement[gap + 1..] {
            self.pos[w] += 1;
        }
    }

    fn remove(&mut self, gap: usize) {
        let v = self.arrangement.remove(gap);
        self.pos.pop();
        debug_assert_eq!(v, self.arrangement.len());
        for &w in &self.arrangement[gap..] {
            self.pos[w] -= 1;
        }
    }

    fn visit(&mut self) {
        let size = self.arrangement.len();
        self.nodes += 1;
        self.max_size = self.max_size.max(size);
        if self.per_size.len() <= size {
            self.per_size.resize(size + 1, 0);
        }
        self.per_size[size] += 1;
    }

    /// Depth-first over gaps left to right; true once `target` is reached.
    fn descend(&mut self) -> bool {
        if self.arrangement.len() == self.target {
            return true;
        }
        for gap in 0..=self.arrangement.len() {
            if !self.fits(gap) {
                continue;
            }
            if self.nodes >= self.node_budget {
                self.limit_hit = true;
                return false;
            }
            self.insert(gap);
            self.visit();
            if self.descend() {
                return true;
            }
            self.remove(gap);
            if self.limit_hit {
                return false;
            }
        }
        false
    }
}

/// Backtracking search for a chaotic arrangement of `{0..max_size-1}` whose
/// restriction to the pattern's values is the pattern.
///
/// Values are inserted in increasing order into every gap, pruning as soon
/// as the new value closes a monotone 3-AP. The first insertion level is
/// split into branches (run in parallel under [`Strategy::Parallel`]), each
/// with its own `node_budget`; branches are then read in gap order and the
/// first one that extends or runs out of nodes decides the outcome, so
/// results do not depend on scheduling.
pub fn extension_search(
    pattern: &PartialArrangement,
    max_size: usize,
    node_budget: u64,
    strategy: Strategy,
) -> Result<SearchReport, Error> {
    if let Some(t) = verifier::find_monotone_3ap(&pattern.to_map()) {
        return Err(Error::Precondition(format!("pattern {pattern} is not chaotic: {t}")));
    }
    let n = pattern.len();
    if max_size <= n {
        return Err(Error::Precondition(format!("max size {max_size} must exceed the pattern length {n}")));
    }
    let mut pos = vec![0; n];
    for (p, &v) in pattern.values().iter().enumerate() {
        pos[v] = p;
    }
    let root = Branch {
        arrangement: pattern.values().to_vec(),
        pos,
        target: max_size,
        nodes: 0,
        node_budget,
        max_size: n,
        per_size: vec![0; n + 1],
        limit_hit: false,
    };
    let run_gap = |gap: usize| -> Option<Branch> {
        if !root.fits(gap) {
            return None;
        }
        let mut b = Branch {
            arrangement: root.arrangement.clone(),
            pos: root.pos.clone(),
            per_size: vec![0; n + 1],
            ..root
        };
        b.insert(gap);
        b.visit();
        b.descend();
        Some(b)
    };
    let gaps = 0..=n;
    let branches: Vec<Option<Branch>> = match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            gaps.into_par_iter().map(run_gap).collect()
        }
        _ => {
            // Sequential runs stop at the first deciding branch.
            let mut out = Vec::new();
            for gap in gaps {
                let b = run_gap(gap);
                let decided =
                    b.as_ref().is_some_and(|b| b.limit_hit || b.arrangement.len() == max_size);
                out.push(b);
                if decided {
                    break;
                }
            }
            out
        }
    };

    let mut nodes = 0;
    let mut per_size = vec![0u64; n + 1];
    per_size[n] = 1;
    let mut reached = n;
    for b in branches.into_iter().flatten() {
        nodes += b.nodes;
        if per_size.len() < b.per_size.len() {
            per_size.resize(b.per_size.len(), 0);
        }
        for (i, c) in b.per_size.iter().enumerate() {
            if i > n {
                per_size[i] += c;
            }
        }
        reached = reached.max(b.max_size);
        if b.arrangement.len() == max_size {
            return Ok(SearchReport { outcome: SearchOutcome::Extended { arrangement: b.arrangement }, nodes, per_size });
        }
        if b.limit_hit {
            return Ok(SearchReport { outcome: SearchOutcome::Inconclusive, nodes, per_size });
        }
    }
    Ok(SearchReport { outcome: SearchOutcome::Blocked { depth: reached + 1 }, nodes, per_size })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum NegativeOutcome {
    /// A search for a fresh point ran out of budget at step `step`.
    Blocked {
        step: usize,
        lower: Option<Rational>,
        upper: Option<Rational>,
    },
    /// The prefix was built, but the suspected isolated point is not in its
    /// image. Consistent with the theorem: the point may just not be reached.
    IsolatedUncovered { depth: usize, point: OrderPoint },
    /// Q was refused outright because the order has both endpoints.
    Rejected { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeReport {
    pub order: String,
    pub source: String,
    pub outcome: NegativeOutcome,
}

/// Points sampled when looking for the isolated point after a successful run.
const ISOLATION_SAMPLE: usize = 64;

/// Runs a construction into an order declared to have isolated points and
/// reports how it fails. A completed prefix covering the isolated point is
/// an error, since it means the searches found points that should not exist.
pub fn negative_isolated_run(
    order: Arc<CountableOrder>,
    source: Source,
    depth: usize,
    budget: SearchBudget,
) -> Result<NegativeReport, Error> {
    if !order.declared().isolated_points {
        return Err(Error::Precondition(format!("{} is not declared to have isolated points", order.name())));
    }
    let report = |outcome| NegativeReport {
        order: order.name().to_string(),
        source: source.to_string(),
        outcome,
    };
    match construct_prefix(source, order.clone(), depth, budget) {
        Err(e) => match (e.step, e.error) {
            (Some(step), Error::BudgetExceeded { lower, upper, .. }) => {
                Ok(report(NegativeOutcome::Blocked { step, lower, upper }))
            }
            (None, Error::OrderUnsuitable(reason)) => Ok(report(NegativeOutcome::Rejected { reason })),
            (_, other) => Err(other),
        },
        Ok(state) => {
            let witness = order
                .search_isolated_point(ISOLATION_SAMPLE, budget)
                .ok_or_else(|| Error::Internal(format!("built depth {depth} and found no isolated point")))?;
            let images: HashMap<OrderPoint, ()> =
                state.map().entries().iter().map(|e| (e.image.clone(), ())).collect();
            if images.contains_key(&witness.point) {
                return Err(Error::Internal(format!(
                    "unexpected success: isolated point {} is in the image of f_{depth}",
                    witness.point
                )));
            }
            Ok(report(NegativeOutcome::IsolatedUncovered { depth, point: witness.point }))
        }
    }
}
