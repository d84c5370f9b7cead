#![allow(dead_code)]

use std::collections::BTreeSet;

use mstd_core::fringe::{curated_fringes, is_weak_mstd_fringe, richness_feasible, search_fringes, FringeTuple};
use mstd_core::{IntSet, RhoVector};
use rand::Rng;

pub fn rv(p: f64, rho1: f64, rho2: f64) -> RhoVector {
    RhoVector::new(p, rho1, rho2).unwrap()
}

pub fn set(universe: usize, xs: &[usize]) -> IntSet {
    IntSet::from_elements(universe, xs.iter().copied()).unwrap()
}

pub fn pair(a: &[usize], b: &[usize]) -> (IntSet, IntSet) {
    let u = a.iter().chain(b).max().map_or(1, |m| m + 1);
    (set(u, a), set(u, b))
}

pub fn naive_sums(a: &[usize], b: &[usize]) -> BTreeSet<usize> {
    a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect()
}

pub fn naive_signed_diffs(a: &[usize], b: &[usize]) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in b {
            out.insert(x as i64 - y as i64);
            out.insert(y as i64 - x as i64);
        }
    }
    out
}

pub fn naive_is_mstd(a: &[usize], b: &[usize]) -> bool {
    naive_sums(a, b).len() > naive_signed_diffs(a, b).len()
}

pub fn random_elems(rng: &mut impl Rng, n: usize, density: f64) -> Vec<usize> {
    (0..=n).filter(|_| rng.gen_bool(density)).collect()
}

/// Draws one element's membership `(in A, in B)` under `r`.
pub fn draw_class(rng: &mut impl Rng, r: &RhoVector) -> (bool, bool) {
    let in_a = rng.gen_bool(r.p);
    let in_b = rng.gen_bool(if in_a { r.rho1 } else { r.rho2 });
    (in_a, in_b)
}

/// A pair over `{0..n}` whose order-`k` fringe is `t` and whose middle is drawn from `r`.
pub fn pinned_pair(rng: &mut impl Rng, t: &FringeTuple, n: usize, r: &RhoVector) -> (IntSet, IntSet) {
    let k = t.k;
    let (mut a, mut b) = (IntSet::new(n + 1), IntSet::new(n + 1));
    for e in 0..=k {
        if t.l.contains(e) {
            a.insert(e);
        }
        if t.lp.contains(e) {
            b.insert(e);
        }
        if t.r.contains(e) {
            a.insert(n - e);
        }
        if t.rp.contains(e) {
            b.insert(n - e);
        }
    }
    for e in k + 1..n - k {
        let (x, y) = draw_class(rng, r);
        if x {
            a.insert(e);
        }
        if y {
            b.insert(e);
        }
    }
    (a, b)
}

/// Strict fringe tuples that admit rich completions: the shipped list plus
/// the exhaustive search for `k <= 3`.
pub fn strict_pool() -> Vec<FringeTuple> {
    let mut pool: Vec<FringeTuple> = curated_fringes()
        .into_iter()
        .filter(mstd_core::fringe::is_mstd_fringe)
        .collect();
    for k in 0..=3 {
        pool.extend(search_fringes(k, false).unwrap().into_iter().filter(richness_feasible));
    }
    pool
}

/// Weak fringe tuples with `L∩L′ = R∩R′ = ∅` that showed a rich disjoint
/// completion in a short screening run.
pub fn weak_disjoint_pool() -> Vec<FringeTuple> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let r = RhoVector::new(0.5, 0.0, 1.0).unwrap();
    weak_disjoint_candidates()
        .into_iter()
        .filter(|t| {
            let n = 4 * t.k + 20;
            (0..16).any(|_| {
                let (a, b) = pinned_pair(&mut rng, t, n, &r);
                mstd_core::fringe::is_rich_pair(&a, &b, n, t.k).unwrap()
            })
        })
        .collect()
}

fn weak_disjoint_candidates() -> Vec<FringeTuple> {
    let disjoint = |t: &FringeTuple| {
        t.l.intersection(&t.lp).unwrap().is_empty() && t.r.intersection(&t.rp).unwrap().is_empty()
    };
    let mut pool: Vec<FringeTuple> = curated_fringes()
        .into_iter()
        .filter(|t| is_weak_mstd_fringe(t) && disjoint(t))
        .collect();
    for k in 0..=3 {
        pool.extend(
            search_fringes(k, true)
                .unwrap()
                .into_iter()
                .filter(|t| disjoint(t) && richness_feasible(t)),
        );
    }
    pool
}

/// All `k`-sets of pairwise disjoint two-element subsets of `{1..n}` sharing one sum.
pub fn brute_xi1(n: usize, k: usize) -> u64 {
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
    fn extend(pairs: &[(usize, usize)], start: usize, left: usize, chosen: &mut Vec<(usize, usize)>) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for i in start..pairs.len() {
            let (a, b) = pairs[i];
            if let Some(&(x, y)) = chosen.first() {
                if a + b != x + y {
                    continue;
                }
            }
            if chosen.iter().any(|&(x, y)| x == a || x == b || y == a || y == b) {
                continue;
            }
            chosen.push((a, b));
            total += extend(pairs, i + 1, left - 1, chosen);
            chosen.pop();
        }
        total
    }
    extend(&pairs, 0, k, &mut Vec::new())
}
