//! Countable total orders given by an enumeration and a comparator.
//!
//! Every order here lives on a subset of Q (its *carrier*), compared either
//! in the standard direction or reversed. Its enumeration `g` is the
//! canonical Q enumeration restricted to the carrier, so `g(0)` is the
//! carrier's first point of least height.
//!
//! Whether an order has isolated points, a maximum or a minimum is declared
//! metadata, not something decided from finite data. The searches below only
//! terminate reliably on orders whose declarations are true: in an order
//! without isolated points, a nonempty open interval holds infinitely many
//! points (a finite one would contain an isolated point), so the extension
//! steps of the construction always find fresh points. When a search runs
//! out of budget on such an interval, that is evidence of an isolated point.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::enumerate::{IntegerEnumeration, RationalPairs};
use crate::error::Error;
use crate::rational::{cmp_small, Rational};

/// Default number of enumerated points a search may inspect.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Enumerated points kept in memory per order, as `(p, q)` pairs; later
/// points are regenerated.
const CACHE_CAP: usize = 1 << 20;

/// An element of the target order. For built-in and file-described orders it
/// is the underlying rational; comparison must go through
/// [`CountableOrder::compare`] because the order may be reversed.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrderPoint(pub Rational);

impl OrderPoint {
    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl From<Rational> for OrderPoint {
    fn from(r: Rational) -> Self {
        OrderPoint(r)
    }
}

impl fmt::Display for OrderPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for OrderPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Maximum number of enumerated points a search may inspect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget(usize);

impl SearchBudget {
    pub fn new(max_enumeration_index: usize) -> Result<Self, Error> {
        if max_enumeration_index == 0 {
            return Err(Error::Precondition("search budget must be positive".into()));
        }
        Ok(SearchBudget(max_enumeration_index))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget(DEFAULT_BUDGET)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Standard,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub value: Rational,
    pub closed: bool,
}

impl Bound {
    pub fn closed(value: Rational) -> Self {
        Bound { value, closed: true }
    }

    pub fn open(value: Rational) -> Self {
        Bound { value, closed: false }
    }
}

/// One component of a carrier; the carrier is the union of its pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    Rationals {
        #[serde(default)]
        lower: Option<Bound>,
        #[serde(default)]
        upper: Option<Bound>,
    },
    Integers {
        #[serde(default)]
        lower: Option<Bound>,
        #[serde(default)]
        upper: Option<Bound>,
    },
    Points {
        values: Vec<Rational>,
    },
}

fn above(lower: &Option<Bound>, ord: Ordering) -> bool {
    // `ord` is value.cmp(bound)
    match lower {
        None => true,
        Some(b) => ord == Ordering::Greater || (b.closed && ord == Ordering::Equal),
    }
}

fn below(upper: &Option<Bound>, ord: Ordering) -> bool {
    match upper {
        None => true,
        Some(b) => ord == Ordering::Less || (b.closed && ord == Ordering::Equal),
    }
}

impl Piece {
    fn contains_small(&self, p: i64, q: i64) -> bool {
        let within = |lower: &Option<Bound>, upper: &Option<Bound>| {
            above(lower, lower.as_ref().map_or(Ordering::Greater, |b| cmp_small(p, q, &b.value)))
                && below(upper, upper.as_ref().map_or(Ordering::Less, |b| cmp_small(p, q, &b.value)))
        };
        match self {
            Piece::Rationals { lower, upper } => within(lower, upper),
            Piece::Integers { lower, upper } => q == 1 && within(lower, upper),
            Piece::Points { values } => {
                values.iter().any(|v| cmp_small(p, q, v) == Ordering::Equal)
            }
        }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        let within = |lower: &Option<Bound>, upper: &Option<Bound>| {
            above(lower, lower.as_ref().map_or(Ordering::Greater, |b| r.cmp(&b.value)))
                && below(upper, upper.as_ref().map_or(Ordering::Less, |b| r.cmp(&b.value)))
        };
        match self {
            Piece::Rationals { lower, upper } => within(lower, upper),
            Piece::Integers { lower, upper } => r.is_integer() && within(lower, upper),
            Piece::Points { values } => values.contains(r),
        }
    }

    fn is_infinite(&self) -> bool {
        match self {
            Piece::Rationals { lower: Some(l), upper: Some(u) } => l.value < u.value,
            Piece::Rationals { .. } => true,
            Piece::Integers { lower: Some(_), upper: Some(_) } => false,
            Piece::Integers { .. } => true,
            Piece::Points { .. } => false,
        }
    }
}

/// Properties an order claims about itself. Maximum and minimum are stated
/// in the order's own direction.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DeclaredProperties {
    pub isolated_points: bool,
    #[serde(default)]
    pub maximum: Option<Rational>,
    #[serde(default)]
    pub minimum: Option<Rational>,
}

/// Serializable form of a countable order, loadable from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDescription {
    pub name: String,
    #[serde(default)]
    pub direction: Direction,
    pub pieces: Vec<Piece>,
    pub declared: DeclaredProperties,
}

/// The built-in catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinOrder {
    /// Q with its usual order: dense, no endpoints.
    QStandard,
    /// Q ∩ [0, 1]: dense with both endpoints.
    QUnitClosed,
    /// Q ∩ [0, 1): dense, minimum only.
    QUnitHalfOpen,
    /// Z: every point is isolated.
    ZStandard,
    /// Q ∩ ([0, 1] ∪ {2}): the point 2 is isolated.
    QPlusIsolated,
}

impl BuiltinOrder {
    pub const ALL: [BuiltinOrder; 5] = [
        BuiltinOrder::QStandard,
        BuiltinOrder::QUnitClosed,
        BuiltinOrder::QUnitHalfOpen,
        BuiltinOrder::ZStandard,
        BuiltinOrder::QPlusIsolated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinOrder::QStandard => "q-standard",
            BuiltinOrder::QUnitClosed => "q-unit-closed",
            BuiltinOrder::QUnitHalfOpen => "q-unit-half-open",
            BuiltinOrder::ZStandard => "z-standard",
            BuiltinOrder::QPlusIsolated => "q-plus-isolated",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            BuiltinOrder::QStandard => "Q, no isolated points, no maximum, no minimum",
            BuiltinOrder::QUnitClosed => "Q ∩ [0,1], no isolated points, maximum 1, minimum 0",
            BuiltinOrder::QUnitHalfOpen => "Q ∩ [0,1), no isolated points, minimum 0",
            BuiltinOrder::ZStandard => "Z, every point isolated",
            BuiltinOrder::QPlusIsolated => "Q ∩ ([0,1] ∪ {2}), 2 is isolated",
        }
    }

    pub fn description(self) -> OrderDescription {
        let zero = Rational::zero();
        let one = Rational::one();
        let (pieces, declared) = match self {
            BuiltinOrder::QStandard => (
                vec![Piece::Rationals { lower: None, upper: None }],
                DeclaredProperties::default(),
            ),
            BuiltinOrder::QUnitClosed => (
                vec![Piece::Rationals {
                    lower: Some(Bound::closed(zero.clone())),
                    upper: Some(Bound::closed(one.clone())),
                }],
                DeclaredProperties { isolated_points: false, maximum: Some(one), minimum: Some(zero) },
            ),
            BuiltinOrder::QUnitHalfOpen => (
                vec![Piece::Rationals {
                    lower: Some(Bound::closed(zero.clone())),
                    upper: Some(Bound::open(one)),
                }],
                DeclaredProperties { isolated_points: false, maximum: None, minimum: Some(zero) },
            ),
            BuiltinOrder::ZStandard => (
                vec![Piece::Integers { lower: None, upper: None }],
                DeclaredProperties { isolated_points: true, maximum: None, minimum: None },
            ),
            BuiltinOrder::QPlusIsolated => (
                vec![
                    Piece::Rationals {
                        lower: Some(Bound::closed(zero.clone())),
                        upper: Some(Bound::closed(one)),
                    },
                    Piece::Points { values: vec![Rational::from_integer(2)] },
                ],
                DeclaredProperties {
                    isolated_points: true,
                    maximum: Some(Rational::from_integer(2)),
                    minimum: Some(zero),
                },
            ),
        };
        OrderDescription {
            name: self.name().to_string(),
            direction: Direction::Standard,
            pieces,
            declared,
        }
    }
}

impl FromStr for BuiltinOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        BuiltinOrder::ALL
            .into_iter()
            .find(|b| b.name() == norm)
            .ok_or_else(|| Error::UnknownOrder(s.to_string()))
    }
}

impl fmt::Display for BuiltinOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn to_point((p, q): (i64, i64)) -> OrderPoint {
    OrderPoint(Rational::new(p, q).expect("q >= 1"))
}

/// A search bound, kept as machine integers when it fits.
enum SmallBound<'a> {
    Small(i64, i64),
    Big(&'a Rational),
}

impl<'a> SmallBound<'a> {
    fn new(b: &'a OrderPoint) -> Self {
        match (b.0.numer().to_i64(), b.0.denom().to_i64()) {
            (Some(p), Some(q)) => SmallBound::Small(p, q),
            _ => SmallBound::Big(&b.0),
        }
    }

    /// `p/q` compared with the bound in the standard order.
    fn cmp_candidate(&self, (p, q): (i64, i64)) -> Ordering {
        match *self {
            SmallBound::Small(bp, bq) => (p as i128 * bq as i128).cmp(&(bp as i128 * q as i128)),
            SmallBound::Big(b) => cmp_small(p, q, b),
        }
    }
}

#[derive(Clone, Debug)]
enum Generator {
    Integers(IntegerEnumeration),
    Rationals(RationalPairs),
}

#[derive(Debug)]
struct EnumCache {
    pairs: Vec<(i64, i64)>,
    generator: Generator,
}

/// A countably infinite totally ordered set `(X, ≼)` with a fixed
/// enumeration `g: N → X`.
#[derive(Debug)]
pub struct CountableOrder {
    desc: OrderDescription,
    integer_only: bool,
    cache: RwLock<EnumCache>,
}

impl Clone for CountableOrder {
    fn clone(&self) -> Self {
        CountableOrder::build(self.desc.clone())
    }
}

/// A point found by a search, with its enumeration index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Found {
    pub index: usize,
    pub point: OrderPoint,
}

/// Which of the three isolation patterns a witness exhibits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsolationCase {
    /// `{x | x ≺ x0} = {p}`.
    OnlyBelow { x0: OrderPoint },
    /// `{x | x ≻ x0} = {p}`.
    OnlyAbove { x0: OrderPoint },
    /// `{x | x0 ≺ x ≺ x1} = {p}`.
    Between { x0: OrderPoint, x1: OrderPoint },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolationWitness {
    pub point: OrderPoint,
    pub index: usize,
    pub case: IsolationCase,
}

impl CountableOrder {
    pub fn builtin(which: BuiltinOrder) -> Self {
        CountableOrder::build(which.description())
    }

    /// Resolves a catalog name such as `q-standard` or `Q_STANDARD`.
    pub fn by_name(name: &str) -> Result<Self, Error> {
        Ok(CountableOrder::builtin(name.parse()?))
    }

    pub fn from_description(desc: OrderDescription) -> Result<Self, Error> {
        if desc.pieces.is_empty() {
            return Err(Error::InvalidOrder("no pieces".into()));
        }
        for piece in &desc.pieces {
            match piece {
                Piece::Rationals { lower: Some(l), upper: Some(u) }
                | Piece::Integers { lower: Some(l), upper: Some(u) }
                    if l.value > u.value =>
                {
                    return Err(Error::InvalidOrder(format!("empty interval [{}, {}]", l.value, u.value)));
                }
                Piece::Points { values } if values.is_empty() => {
                    return Err(Error::InvalidOrder("empty point list".into()));
                }
                _ => {}
            }
        }
        if !desc.pieces.iter().any(Piece::is_infinite) {
            return Err(Error::InvalidOrder(format!("{} is finite", desc.name)));
        }
        Ok(CountableOrder::build(desc))
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let desc: OrderDescription =
            serde_json::from_str(text).map_err(|e| Error::InvalidOrder(e.to_string()))?;
        CountableOrder::from_description(desc)
    }

    fn build(desc: OrderDescription) -> Self {
        let integer_only = desc.pieces.iter().all(|p| matches!(p, Piece::Integers { .. }));
        let generator = if integer_only {
            Generator::Integers(IntegerEnumeration::default())
        } else {
            Generator::Rationals(RationalPairs::new())
        };
        CountableOrder {
            desc,
            integer_only,
            cache: RwLock::new(EnumCache { pairs: Vec::new(), generator }),
        }
    }

    pub fn name(&self) -> &str {
        &self.desc.name
    }

    pub fn description(&self) -> &OrderDescription {
        &self.desc
    }

    pub fn declared(&self) -> &DeclaredProperties {
        &self.desc.declared
    }

    pub fn direction(&self) -> Direction {
        self.desc.direction
    }

    /// The same carrier with the comparator flipped.
    pub fn reversed(&self) -> Self {
        let mut desc = self.desc.clone();
        desc.direction = match desc.direction {
            Direction::Standard => Direction::Reversed,
            Direction::Reversed => Direction::Standard,
        };
        std::mem::swap(&mut desc.declared.maximum, &mut desc.declared.minimum);
        desc.name = match desc.name.strip_prefix("reversed:") {
            Some(inner) => inner.to_string(),
            None => format!("reversed:{}", desc.name),
        };
        CountableOrder::build(desc)
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.desc.pieces.iter().any(|p| p.contains(r))
    }

    fn contains_small(&self, p: i64, q: i64) -> bool {
        self.desc.pieces.iter().any(|piece| piece.contains_small(p, q))
    }

    pub fn compare(&self, a: &OrderPoint, b: &OrderPoint) -> Ordering {
        let ord = a.0.cmp(&b.0);
        match self.desc.direction {
            Direction::Standard => ord,
            Direction::Reversed => ord.reverse(),
        }
    }

    pub fn less(&self, a: &OrderPoint, b: &OrderPoint) -> bool {
        self.compare(a, b) == Ordering::Less
    }

    fn next_generated(&self, generator: &mut Generator) -> (i64, i64) {
        match generator {
            Generator::Integers(it) => loop {
                let n = it.next().expect("infinite");
                if self.contains_small(n, 1) {
                    return (n, 1);
                }
            },
            Generator::Rationals(it) => loop {
                let (p, q) = it.next().expect("infinite");
                if self.contains_small(p, q) {
                    return (p, q);
                }
            },
        }
    }

    fn ensure_cached(&self, len: usize) {
        let len = len.min(CACHE_CAP);
        if self.cache.read().expect("poisoned").pairs.len() >= len {
            return;
        }
        let mut cache = self.cache.write().expect("poisoned");
        let mut generator = cache.generator.clone();
        while cache.pairs.len() < len {
            let pair = self.next_generated(&mut generator);
            cache.pairs.push(pair);
        }
        cache.generator = generator;
    }

    /// `g(index)`.
    pub fn point(&self, index: usize) -> OrderPoint {
        let mut found = None;
        self.scan_pairs(index, index + 1, |_, pair| {
            found = Some(pair);
            true
        });
        to_point(found.expect("scan covers index"))
    }

    /// Visits `g(0), g(1), ...` up to `limit` points, stopping at the first
    /// index where `visit` returns true.
    pub fn scan<F: FnMut(usize, &OrderPoint) -> bool>(&self, limit: usize, mut visit: F) -> Option<usize> {
        self.scan_pairs(0, limit, |i, pair| visit(i, &to_point(pair)))
    }

    /// Visits indices `start..limit` as `(p, q)` pairs.
    fn scan_pairs<F>(&self, start: usize, limit: usize, mut visit: F) -> Option<usize>
    where
        F: FnMut(usize, (i64, i64)) -> bool,
    {
        let mut start = start;
        while start < limit.min(CACHE_CAP) {
            let end = limit.min(CACHE_CAP).min((start * 2).max(1024));
            self.ensure_cached(end);
            let cache = self.cache.read().expect("poisoned");
            for (offset, &pair) in cache.pairs[start..end].iter().enumerate() {
                if visit(start + offset, pair) {
                    return Some(start + offset);
                }
            }
            start = end;
        }
        if limit <= CACHE_CAP {
            return None;
        }
        self.ensure_cached(CACHE_CAP);
        let mut generator = self.cache.read().expect("poisoned").generator.clone();
        for index in CACHE_CAP..limit {
            let pair = self.next_generated(&mut generator);
            if index >= start && visit(index, pair) {
                return Some(index);
            }
        }
        None
    }

    /// The first `n` enumerated points.
    pub fn prefix(&self, n: usize) -> Vec<OrderPoint> {
        let mut out = Vec::with_capacity(n);
        self.scan(n, |_, p| {
            out.push(p.clone());
            false
        });
        out
    }

    /// First enumerated point strictly between the given bounds (either may
    /// be open-ended) and outside `exclude`.
    pub fn find_first(
        &self,
        lower: Option<&OrderPoint>,
        upper: Option<&OrderPoint>,
        exclude: &HashSet<OrderPoint>,
        budget: SearchBudget,
    ) -> Result<Found, Error> {
        self.find_first_from(0, lower, upper, exclude, budget)
    }

    /// [`find_first`](Self::find_first) restricted to indices `start..`.
    /// Callers use it to resume when no earlier index can qualify, e.g. a
    /// ray search whose lower bound only moves up.
    pub fn find_first_from(
        &self,
        start: usize,
        lower: Option<&OrderPoint>,
        upper: Option<&OrderPoint>,
        exclude: &HashSet<OrderPoint>,
        budget: SearchBudget,
    ) -> Result<Found, Error> {
        let lo = lower.map(SmallBound::new);
        let hi = upper.map(SmallBound::new);
        let reversed = self.desc.direction == Direction::Reversed;
        // Position of the candidate relative to a bound, in this order.
        let side = |pair: (i64, i64), b: &SmallBound| {
            let ord = b.cmp_candidate(pair);
            if reversed {
                ord.reverse()
            } else {
                ord
            }
        };
        let mut hit = None;
        self.scan_pairs(start, budget.get(), |i, pair| {
            if !(lo.as_ref().is_none_or(|l| side(pair, l) == Ordering::Greater)
                && hi.as_ref().is_none_or(|u| side(pair, u) == Ordering::Less))
            {
                return false;
            }
            let point = to_point(pair);
            if exclude.contains(&point) {
                return false;
            }
            hit = Some(Found { index: i, point });
            true
        });
        hit.ok_or_else(|| Error::BudgetExceeded {
            lower: lower.map(|p| p.0.clone()),
            upper: upper.map(|p| p.0.clone()),
            budget: budget.get(),
        })
    }

    pub fn find_strictly_between(
        &self,
        lower: &OrderPoint,
        upper: &OrderPoint,
        exclude: &HashSet<OrderPoint>,
        budget: SearchBudget,
    ) -> Result<Found, Error> {
        if !self.less(lower, upper) {
            return Err(Error::Precondition(format!("{lower} is not below {upper}")));
        }
        self.find_first(Some(lower), Some(upper), exclude, budget)
    }

    pub fn find_strictly_above(
        &self,
        lower: &OrderPoint,
        exclude: &HashSet<OrderPoint>,
        budget: SearchBudget,
    ) -> Result<Found, Error> {
        self.find_first(Some(lower), None, exclude, budget)
    }

    pub fn find_strictly_below(
        &self,
        upper: &OrderPoint,
        exclude: &HashSet<OrderPoint>,
        budget: SearchBudget,
    ) -> Result<Found, Error> {
        self.find_first(None, Some(upper), exclude, budget)
    }

    /// Looks for a point that appears isolated. The first `depth` enumerated
    /// points are sorted; each one, taken in enumeration order, is tested
    /// against its neighbours in that sample by searching the full order
    /// (within `budget`) for another point in the neighbouring interval or
    /// ray. A returned witness is evidence, not proof; `None` proves nothing.
    pub fn search_isolated_point(&self, depth: usize, budget: SearchBudget) -> Option<IsolationWitness> {
        let sample = self.prefix(depth);
        if sample.len() < 2 {
            return None;
        }
        let mut sorted: Vec<usize> = (0..sample.len()).collect();
        sorted.sort_by(|&a, &b| self.compare(&sample[a], &sample[b]));
        let mut rank = vec![0; sample.len()];
        for (pos, &idx) in sorted.iter().enumerate() {
            rank[idx] = pos;
        }
        let last = sample.len() - 1;
        for (index, p) in sample.iter().enumerate() {
            let pos = rank[index];
            let exclude: HashSet<OrderPoint> = [p.clone()].into();
            let case = if pos == 0 {
                let x0 = &sample[sorted[1]];
                self.find_strictly_below(x0, &exclude, budget)
                    .err()
                    .map(|_| IsolationCase::OnlyBelow { x0: x0.clone() })
            } else if pos == last {
                let x0 = &sample[sorted[last - 1]];
                self.find_strictly_above(x0, &exclude, budget)
                    .err()
                    .map(|_| IsolationCase::OnlyAbove { x0: x0.clone() })
            } else {
                let x0 = &sample[sorted[pos - 1]];
                let x1 = &sample[sorted[pos + 1]];
                self.find_strictly_between(x0, x1, &exclude, budget)
                    .err()
                    .map(|_| IsolationCase::Between { x0: x0.clone(), x1: x1.clone() })
            };
            if let Some(case) = case {
                return Some(IsolationWitness { point: p.clone(), index, case });
            }
        }
        None
    }

    /// Whether the integer-only fast enumeration is in use.
    pub fn is_integer_carrier(&self) -> bool {
        self.integer_only
    }
}
