mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use apfree::construct::{construct_prefix, extend_add_outside, ConstructionState, Rule, Source};
use apfree::emit::{self, Format};
use apfree::verifier;
use apfree::{BuiltinOrder, CountableOrder, Entry, Error, FiniteOrderedMap, OrderPoint, Rational, SearchBudget};
use common::{all_subset_sums, naive_binary, q, z_window};

fn order(b: BuiltinOrder) -> Arc<CountableOrder> {
    Arc::new(CountableOrder::builtin(b))
}

fn domain(state: &ConstructionState) -> BTreeSet<Rational> {
    state.map().domain_set().into_iter().collect()
}

fn range(lo: i64, hi: i64) -> BTreeSet<Rational> {
    (lo..=hi).map(Rational::from_integer).collect()
}

#[test]
fn domains_have_closed_forms() {
    for n in 0..=10u32 {
        let s = construct_prefix(Source::N, order(BuiltinOrder::QStandard), n as usize, SearchBudget::default()).unwrap();
        assert_eq!(domain(&s), range(0, (1 << n) - 1), "N, n = {n}");
        let s = construct_prefix(Source::Z, order(BuiltinOrder::QStandard), n as usize, SearchBudget::default()).unwrap();
        let (lo, hi) = z_window(n);
        assert_eq!(domain(&s), range(lo, hi), "Z, n = {n}");
    }
    let s = construct_prefix(Source::Z, order(BuiltinOrder::QStandard), 2, SearchBudget::default()).unwrap();
    assert_eq!(domain(&s), range(-2, 1));
}

#[test]
fn q_domains_are_subset_sums() {
    let s = construct_prefix(Source::Q, order(BuiltinOrder::QStandard), 8, SearchBudget::default()).unwrap();
    let expected: BTreeSet<Rational> = all_subset_sums(s.generators()).into_iter().collect();
    assert_eq!(expected.len(), 256);
    assert_eq!(domain(&s), expected);
}

#[test]
fn small_prefixes_pass_the_naive_oracle() {
    for source in [Source::N, Source::Z, Source::Q] {
        let s = construct_prefix(source, order(BuiltinOrder::QStandard), 6, SearchBudget::default()).unwrap();
        let seq = s.map().domain_sequence();
        assert_eq!(seq.len(), 64);
        assert!(naive_binary(&seq).is_none(), "{source}");
    }
    let s = construct_prefix(Source::N, order(BuiltinOrder::QStandard), 3, SearchBudget::default()).unwrap();
    assert!(verifier::is_binary(&s.map()));
}

#[test]
fn q_prefix_covers_the_first_targets() {
    let ord = order(BuiltinOrder::QStandard);
    let s = construct_prefix(Source::Q, ord.clone(), 6, SearchBudget::default()).unwrap();
    let images = s.map().image_set();
    for k in 0..3 {
        assert!(images.contains(&ord.point(k)), "g({k})");
    }
    let rules: Vec<Rule> = s.audit().iter().map(|r| r.rule).collect();
    assert_eq!(rules, [Rule::AddOdd, Rule::AddOutside].repeat(3));
}

#[test]
fn each_step_extends_the_last() {
    for source in [Source::N, Source::Z, Source::Q] {
        let mut state = ConstructionState::start(source, order(BuiltinOrder::QStandard), SearchBudget::default()).unwrap();
        for n in 0..7 {
            let before = state.map();
            state.step().unwrap();
            let after = state.map();
            assert!(before.is_restriction_of(&after), "{source} step {n}");
            assert_eq!(after.len(), 2 * before.len());
            state.check().unwrap();
        }
    }
}

#[test]
fn one_sided_orders_for_q() {
    for ord in [order(BuiltinOrder::QUnitHalfOpen), Arc::new(CountableOrder::builtin(BuiltinOrder::QUnitHalfOpen).reversed())] {
        let s = construct_prefix(Source::Q, ord.clone(), 7, SearchBudget::default()).unwrap();
        let m = s.map();
        assert!(verifier::is_binary(&m), "{}", ord.name());
        assert!(m.entries().iter().all(|e| ord.contains(&e.image.0)));
        let images = m.image_set();
        for k in 0..4 {
            assert!(images.contains(&ord.point(k)), "{} g({k})", ord.name());
        }
        assert_eq!(s.reversed(), ord.declared().maximum.is_some());
    }
}

#[test]
fn q_into_a_bounded_order_is_refused() {
    let err = construct_prefix(Source::Q, order(BuiltinOrder::QUnitClosed), 4, SearchBudget::default()).unwrap_err();
    assert_eq!(err.step, None);
    assert!(matches!(err.error, Error::OrderUnsuitable(_)));
    // N and Z only need density, so the same order works for them.
    for source in [Source::N, Source::Z] {
        let s = construct_prefix(source, order(BuiltinOrder::QUnitClosed), 6, SearchBudget::default()).unwrap();
        assert!(verifier::is_binary(&s.map()));
    }
}

#[test]
fn isolated_points_block_the_construction() {
    let budget = SearchBudget::new(10_000).unwrap();
    for source in [Source::N, Source::Z] {
        let err = construct_prefix(source, order(BuiltinOrder::ZStandard), 6, budget).unwrap_err();
        assert!(matches!(err.error, Error::BudgetExceeded { .. }), "{source}: {err}");
        assert!(err.step.unwrap() < 6);
    }
    let err = construct_prefix(Source::N, order(BuiltinOrder::ZStandard), 6, budget).unwrap_err();
    assert_eq!(err.step, Some(2));
    assert!(matches!(&err.error, Error::BudgetExceeded { lower: Some(l), upper: Some(u), .. } if *l == q("-2") && *u == q("0")));
    let err = construct_prefix(Source::N, order(BuiltinOrder::QPlusIsolated), 6, budget).unwrap_err();
    assert_eq!(err.step, Some(2));
    assert!(matches!(&err.error, Error::BudgetExceeded { lower: Some(l), upper: None, .. } if *l == q("1")));
    let partial = err.partial.unwrap();
    assert!(partial.map().image_set().contains(&OrderPoint(q("2"))));
}

#[test]
fn stacking_above_the_top() {
    let ord = order(BuiltinOrder::QStandard);
    let f = FiniteOrderedMap::from_entries(
        ord.clone(),
        vec![
            Entry { domain: q("0"), image: OrderPoint(q("0")) },
            Entry { domain: q("8"), image: OrderPoint(q("1/2")) },
        ],
    )
    .unwrap();
    let (g, placed) = extend_add_outside(&f, &q("1"), SearchBudget::default()).unwrap();
    assert_eq!(g.domain_sequence(), ["0", "8", "1", "9"].map(q));
    assert_eq!(placed.iter().map(|p| p.image.0.clone()).collect::<Vec<_>>(), ["1", "2"].map(q));
    assert!(verifier::is_binary(&g));
    assert!(extend_add_outside(&f, &q("8"), SearchBudget::default()).is_err());
}

#[test]
fn emission_is_reproducible() {
    for format in [Format::Tsv, Format::JsonLines] {
        let run = || {
            let s = construct_prefix(Source::Q, order(BuiltinOrder::QStandard), 5, SearchBudget::default()).unwrap();
            (emit::emit_prefix(&s, format), emit::emit_audit(&s))
        };
        assert_eq!(run(), run());
    }
    let s = construct_prefix(Source::N, order(BuiltinOrder::QStandard), 3, SearchBudget::default()).unwrap();
    let text = emit::emit_prefix(&s, Format::Tsv);
    let mut ranks: Vec<usize> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    ranks.sort_unstable();
    assert_eq!(ranks, (0..8).collect::<Vec<_>>());
    assert!(verifier::is_binary(&emit::parse_map(&text, None).unwrap()));
}
