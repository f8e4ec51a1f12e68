//! Brute-force oracles shared by the integration tests. They use nothing
//! from the library beyond the `Rational` value type.
#![allow(dead_code)]

use apfree::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

/// 2-adic order by repeated halving; `None` for zero.
pub fn ord2(r: &Rational) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let two = BigInt::from(2);
    let count = |mut n: BigInt| {
        let mut k = 0;
        while n.is_even() {
            n /= &two;
            k += 1;
        }
        k
    };
    Some(count(r.numer().abs()) - count(r.denom().clone()))
}

/// First `(i, j, k)`, `i < j < k`, in lexicographic order with
/// `seq[j] - seq[i] = seq[k] - seq[j]`.
pub fn naive_monotone(seq: &[Rational]) -> Option<(usize, usize, usize)> {
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if &seq[j] - &seq[i] == &seq[k] - &seq[j] {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// Same scan with `ord2(seq[j] - seq[i]) = ord2(seq[k] - seq[j])`.
pub fn naive_binary(seq: &[Rational]) -> Option<(usize, usize, usize)> {
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            let left = ord2(&(&seq[j] - &seq[i]));
            for k in j + 1..n {
                if left == ord2(&(&seq[k] - &seq[j])) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

/// All subsets (as sorted index lists) of `gens` summing to `target`.
pub fn subsets_summing_to(gens: &[Rational], target: &Rational) -> Vec<Vec<usize>> {
    assert!(gens.len() < 20);
    let mut out = Vec::new();
    for mask in 0u32..(1 << gens.len()) {
        let idx: Vec<usize> = (0..gens.len()).filter(|i| mask >> i & 1 == 1).collect();
        let sum: Rational = idx.iter().map(|&i| &gens[i]).sum();
        if &sum == target {
            out.push(idx);
        }
    }
    out
}

/// Every subset sum of `gens`, in mask order.
pub fn all_subset_sums(gens: &[Rational]) -> Vec<Rational> {
    (0u32..(1 << gens.len()))
        .map(|mask| (0..gens.len()).filter(|i| mask >> i & 1 == 1).map(|i| &gens[i]).sum())
        .collect()
}

/// Reduced `p/q` with `|p| + q = h`, numerators ascending, heights 1, 2, ...
pub fn walk_rationals(count: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(count);
    let mut h: i64 = 1;
    while out.len() < count {
        for p in -(h - 1)..=(h - 1) {
            let q = h - p.abs();
            if num_integer::gcd(p, q) == 1 {
                out.push(Rational::new(p, q).unwrap());
                if out.len() == count {
                    break;
                }
            }
        }
        h += 1;
    }
    out
}

/// Chaotic orderings of `{0..m-1}` (listed in image order) that induce
/// `pattern` on `{0..pattern.len()-1}`. Brute force over all permutations.
pub fn chaotic_extensions(pattern: &[usize], m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..m).collect();
    permute(&mut perm, 0, &mut |p| {
        let induced: Vec<usize> = p.iter().copied().filter(|&v| v < pattern.len()).collect();
        if induced == pattern && is_chaotic_perm(p) {
            out.push(p.to_vec());
        }
    });
    out
}

pub fn is_chaotic_perm(arrangement: &[usize]) -> bool {
    let mut pos = vec![0; arrangement.len()];
    for (i, &v) in arrangement.iter().enumerate() {
        pos[v] = i;
    }
    let n = arrangement.len();
    for a in 0..n {
        for c in (a + 2..n).step_by(2) {
            let b = (a + c) / 2;
            if (pos[a] < pos[b]) == (pos[b] < pos[c]) {
                return false;
            }
        }
    }
    true
}

pub fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| Rational::from_integer(v)).collect()
}

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

/// `-2(2^n - 1)/3 ..= (2^n - 1)/3` for even `n`, the shifted window for odd `n`.
pub fn z_window(n: u32) -> (i64, i64) {
    if n.is_multiple_of(2) {
        let t = (1i64 << n) - 1;
        (-2 * t / 3, t / 3)
    } else {
        (-2 * ((1i64 << (n - 1)) - 1) / 3, ((1i64 << (n + 1)) - 1) / 3)
    }
}
