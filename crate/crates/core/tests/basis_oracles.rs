mod common;

use apfree::dyadic::{self, RSequence, DEFAULT_CANDIDATE_CAP};
use apfree::enumerate::two_adic_integers;
use apfree::{Error, Rational};
use common::{all_subset_sums, ord2, q, subsets_summing_to};
use proptest::prelude::*;

/// `2^i * a / b` with `a`, `b` odd.
fn term(i: usize, a: i64, b: i64) -> Rational {
    let odd = Rational::new(2 * a + 1, 2 * b + 1).unwrap();
    Rational::from(odd.as_big() * Rational::pow2(i as i64).as_big())
}

/// Subsets `A` with `ord2(x - Σ_A qs) ≥ n`, by brute force.
fn representations(x: &Rational, qs: &[Rational]) -> Vec<Vec<usize>> {
    let n = qs.len() as i64;
    let sums = all_subset_sums(qs);
    (0..sums.len())
        .filter(|&mask| ord2(&(x - &sums[mask])).is_none_or(|v| v >= n))
        .map(|mask| (0..qs.len()).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// `r` minus its dyadic tail, by the same strictly increasing peeling.
fn two_adic_part(r: &Rational) -> Rational {
    let mut x = r.clone();
    while let Some(v) = ord2(&x).filter(|&v| v < 0) {
        x = &x - &Rational::pow2(v);
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn representation_is_the_unique_exhaustive_one(
        digits in prop::collection::vec((-20i64..20, 0i64..10), 1..=10),
        x in (-500i64..500, 0i64..40),
    ) {
        let qs: Vec<Rational> = digits.iter().enumerate().map(|(i, &(a, b))| term(i, a, b)).collect();
        let x = Rational::new(x.0, 2 * x.1 + 1).unwrap();
        let found = dyadic::binary_representation(&x, &qs).unwrap();
        let expected = representations(&x, &qs);
        prop_assert_eq!(expected.len(), 1);
        prop_assert_eq!(&found, &expected[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The q-sequence is built over an enumeration listing the target's
    /// Z_(2) part first; that element is consumed by step `ord2 + 1`, so a
    /// short prefix always suffices.
    #[test]
    fn decompose_round_trips(p in -10_000i64..=10_000, d in 1i64..=10_000) {
        let r = Rational::new(p, d).unwrap();
        let z = two_adic_part(&r);
        let h = std::iter::once(z.clone()).chain(two_adic_integers().filter(move |v| *v != z));
        let qs = dyadic::build_q_sequence(h, 40, DEFAULT_CANDIDATE_CAP).unwrap();
        let rs = dyadic::build_r_sequence(&qs, 80).unwrap();
        let subset = dyadic::decompose(&r, &rs).unwrap();
        prop_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(dyadic::sum_of(&subset, &rs), r);
    }
}

#[test]
fn representation_examples() {
    let powers: Vec<Rational> = [1, 2, 4, 8].iter().map(|&v| Rational::from_integer(v)).collect();
    assert_eq!(dyadic::binary_representation(&q("13"), &powers).unwrap(), vec![0, 2, 3]);
    assert_eq!(dyadic::binary_representation(&q("0"), &powers).unwrap(), Vec::<usize>::new());
    let qs = [q("1"), q("2/3"), q("4"), q("8/5")];
    let expected = representations(&q("5/3"), &qs);
    assert_eq!(expected.len(), 1);
    assert_eq!(dyadic::binary_representation(&q("5/3"), &qs).unwrap(), expected[0]);
    assert!(dyadic::binary_representation(&q("1/2"), &powers).is_err());
    assert!(dyadic::binary_representation(&q("1"), &[q("2")]).is_err());
}

#[test]
fn q_sequence_over_the_naturals() {
    let qs = dyadic::build_q_sequence((0..).map(Rational::from_integer), 6, 1000).unwrap();
    assert_eq!(qs.terms[0].value, q("1"));
    assert_eq!(qs.terms[0].source_index, 1);
    assert!(qs.terms[0].subset.is_empty());
    for (n, t) in qs.terms.iter().enumerate() {
        assert_eq!(ord2(&t.value), Some(n as i64));
    }
}

#[test]
fn canonical_q_sequence_profile_and_coverage() {
    let qs = dyadic::canonical_q_sequence(40).unwrap();
    assert_eq!(qs, dyadic::canonical_q_sequence(40).unwrap());
    let values = qs.values();
    for (n, v) in values.iter().enumerate() {
        assert_eq!(ord2(v), Some(n as i64), "q_{n} = {v}");
        let t = &qs.terms[n];
        let rebuilt: Rational = t.subset.iter().map(|&i| &values[i]).sum();
        assert_eq!(&rebuilt + v, two_adic_integers().nth(t.source_index).unwrap());
    }
    // Each of h(0..20) is an exact subset sum of the 40-term prefix.
    for (l, h) in two_adic_integers().take(20).enumerate() {
        let a = dyadic::binary_representation(&h, &values).unwrap();
        let sum: Rational = a.iter().map(|&i| &values[i]).sum();
        assert_eq!(sum, h, "h({l})");
    }
}

#[test]
fn interleaving_powers_of_two() {
    let qs: Vec<Rational> = (0..3).map(Rational::pow2).collect();
    let rs = RSequence::interleave(&qs, 6).unwrap();
    let expected = ["1", "1/2", "2", "1/4", "4", "1/8"].map(q);
    assert_eq!(rs.terms, expected);
    assert!(RSequence::interleave(&qs, 7).is_err());
}

/// For `n = 2m` every distinct pair of `S_n` has `ord2 ≤ m - 1`; for
/// `n = 2m + 1` every pair has `ord2 ≥ -m`; and `|S_n| = 2^n`.
#[test]
fn r_sequence_gap_properties() {
    let rs = dyadic::canonical_r_sequence(9).unwrap();
    for n in 0..=8usize {
        let sums = all_subset_sums(rs.prefix(n));
        let distinct: std::collections::HashSet<_> = sums.iter().collect();
        assert_eq!(distinct.len(), 1 << n);
        assert_eq!(rs.subset_sums(n).unwrap().len(), 1 << n);
        let m = (n / 2) as i64;
        let r_n = &rs.terms[n];
        for (i, a) in sums.iter().enumerate() {
            for b in &sums[i + 1..] {
                let v = ord2(&(a - b)).unwrap();
                if n % 2 == 0 {
                    assert!(v < m && ord2(r_n) == Some(m), "n={n} {a} {b}");
                } else {
                    assert!(v >= -m && ord2(r_n) == Some(-m - 1), "n={n} {a} {b}");
                }
            }
        }
    }
}

#[test]
fn decompose_examples() {
    let rs = dyadic::canonical_r_sequence(24).unwrap();
    let a = dyadic::decompose(&q("5/6"), &rs).unwrap();
    assert!(a.contains(&1));
    assert!(a.iter().filter(|i| *i % 2 == 1).all(|&i| i == 1));
    let z: Rational = a.iter().filter(|i| *i % 2 == 0).map(|&i| &rs.terms[i]).sum();
    assert_eq!(z, q("1/3"));
    assert_eq!(dyadic::sum_of(&a, &rs), q("5/6"));
    assert!(dyadic::decompose(&q("0"), &rs).unwrap().is_empty());
    let a = dyadic::decompose(&q("7/12"), &rs).unwrap();
    assert_eq!(dyadic::sum_of(&a, &rs), q("7/12"));
    let short = dyadic::canonical_r_sequence(2).unwrap();
    assert!(matches!(dyadic::decompose(&q("1/8"), &short), Err(Error::NeedLongerPrefix(_))));
}

#[test]
fn subset_search_matches_subset_sum_set() {
    let rs = dyadic::canonical_r_sequence(6).unwrap();
    let set = rs.subset_sums(6).unwrap();
    for (k, x) in set.elements().iter().enumerate() {
        assert_eq!(subsets_summing_to(rs.prefix(6), x), vec![set.subset_of(k)]);
    }
}

#[test]
fn shift_lemma_examples() {
    let ints = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x)).collect::<Vec<_>>();
    let below = dyadic::check_shift_lemma(&ints(&[0, 1, 2, 3]), &q("8")).unwrap();
    assert!(below.all_below && below.passed());
    assert_eq!(below.below_conclusion, Some(true));
    let above = dyadic::check_shift_lemma(&ints(&[0, 8]), &q("1")).unwrap();
    assert!(above.all_above && above.passed());
    assert_eq!(above.above_conclusion, Some(true));
    let single = dyadic::check_shift_lemma(&ints(&[0]), &q("3")).unwrap();
    assert!(single.all_differ && single.all_below && single.passed());
}
