//! Finite injective maps from rationals into a countable order.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::order::{BuiltinOrder, CountableOrder, OrderPoint};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub domain: Rational,
    pub image: OrderPoint,
}

/// A finite injection `f: S → X`, entries sorted ascending by image.
#[derive(Clone, Debug)]
pub struct FiniteOrderedMap {
    order: Arc<CountableOrder>,
    entries: Vec<Entry>,
}

impl FiniteOrderedMap {
    pub fn empty(order: Arc<CountableOrder>) -> Self {
        FiniteOrderedMap { order, entries: Vec::new() }
    }

    /// Sorts `entries` by image and checks injectivity in both coordinates.
    pub fn from_entries(order: Arc<CountableOrder>, mut entries: Vec<Entry>) -> Result<Self, Error> {
        entries.sort_by(|x, y| order.compare(&x.image, &y.image));
        for w in entries.windows(2) {
            if order.compare(&w[0].image, &w[1].image) == Ordering::Equal {
                return Err(Error::NotInjective(format!(
                    "{} and {} share image {}",
                    w[0].domain, w[1].domain, w[0].image
                )));
            }
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !seen.insert(&e.domain) {
                return Err(Error::NotInjective(format!("{} listed twice", e.domain)));
            }
        }
        Ok(FiniteOrderedMap { order, entries })
    }

    /// A map given only by the order of its images: `domains[i]` gets the
    /// `i`-th smallest image, realized as the integer `i` in Z.
    pub fn from_ranking(domains: Vec<Rational>) -> Result<Self, Error> {
        let order = Arc::new(CountableOrder::builtin(BuiltinOrder::ZStandard));
        let entries = domains
            .into_iter()
            .enumerate()
            .map(|(i, domain)| Entry { domain, image: OrderPoint(Rational::from_integer(i as i64)) })
            .collect();
        FiniteOrderedMap::from_entries(order, entries)
    }

    /// Convenience for small integer test vectors.
    pub fn from_integer_ranking(domains: &[i64]) -> Result<Self, Error> {
        FiniteOrderedMap::from_ranking(domains.iter().map(|&d| Rational::from_integer(d)).collect())
    }

    pub fn order(&self) -> &Arc<CountableOrder> {
        &self.order
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Domain values listed in ascending image order.
    pub fn domain_sequence(&self) -> Vec<Rational> {
        self.entries.iter().map(|e| e.domain.clone()).collect()
    }

    pub fn domain_set(&self) -> HashSet<Rational> {
        self.entries.iter().map(|e| e.domain.clone()).collect()
    }

    pub fn image_set(&self) -> HashSet<OrderPoint> {
        self.entries.iter().map(|e| e.image.clone()).collect()
    }

    /// Domain value to image-order position.
    pub fn positions(&self) -> HashMap<Rational, usize> {
        self.entries.iter().enumerate().map(|(i, e)| (e.domain.clone(), i)).collect()
    }

    pub fn image_of(&self, domain: &Rational) -> Option<&OrderPoint> {
        self.entries.iter().find(|e| &e.domain == domain).map(|e| &e.image)
    }

    /// Adds entries, keeping image order. Fails if injectivity would break.
    pub fn extended(&self, new: Vec<Entry>) -> Result<Self, Error> {
        let mut all = self.entries.clone();
        all.extend(new);
        FiniteOrderedMap::from_entries(self.order.clone(), all)
    }

    /// `self ⊂ other` as graphs.
    pub fn is_restriction_of(&self, other: &FiniteOrderedMap) -> bool {
        let theirs: HashMap<&Rational, &OrderPoint> =
            other.entries.iter().map(|e| (&e.domain, &e.image)).collect();
        self.entries.iter().all(|e| theirs.get(&e.domain) == Some(&&e.image))
    }

    /// The same graph, compared under `order` (e.g. after reversing back).
    pub fn reinterpret(&self, order: Arc<CountableOrder>) -> Result<Self, Error> {
        FiniteOrderedMap::from_entries(order, self.entries.clone())
    }
}
