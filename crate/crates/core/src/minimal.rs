//! Exhaustive search for small MSTD pairs, canonical forms up to affine
//! maps, and the representation-count structure behind small pairs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::Parallelism;
use crate::sets::{representation_multiplicities, signed_difference_set, small, difference_set, sumset, IntSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SizeClass {
    pub size_a: usize,
    pub size_b: usize,
}

impl SizeClass {
    pub fn new(size_a: usize, size_b: usize) -> Result<Self> {
        if size_a == 0 || size_b == 0 {
            return Err(Error::usage(format!("set sizes must be positive, got {size_a}x{size_b}")));
        }
        Ok(SizeClass { size_a, size_b })
    }

    pub fn swapped(&self) -> SizeClass {
        SizeClass {
            size_a: self.size_b,
            size_b: self.size_a,
        }
    }
}

impl FromStr for SizeClass {
    type Err = Error;

    /// `"3x4"`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::usage(format!("size {s:?} must look like 3x4")))?;
        let p = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::usage(format!("bad size component {t:?}")))
        };
        SizeClass::new(p(a)?, p(b)?)
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.size_a, self.size_b)
    }
}

/// A pair in canonical position and the map that put it there:
/// `canonical = (original − shift) / scale`, then mirrored inside
/// `[0, span]` if `reflected`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalPair {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub original_a: Vec<usize>,
    pub original_b: Vec<usize>,
    pub shift: usize,
    pub scale: usize,
    pub reflected: bool,
    pub span: usize,
}

impl CanonicalPair {
    /// The canonical sets over `{0..span}`.
    pub fn sets(&self) -> (IntSet, IntSet) {
        let u = self.span + 1;
        (
            IntSet::from_elements(u, self.a.iter().copied()).expect("within span"),
            IntSet::from_elements(u, self.b.iter().copied()).expect("within span"),
        )
    }

    pub fn key(&self) -> (&[usize], &[usize]) {
        (&self.a, &self.b)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Translates `A∪B` to start at 0, divides by the gcd of its elements and
/// takes the lexicographically smaller of the pair and its joint reflection.
pub fn canonicalize(a: &IntSet, b: &IntSet) -> Result<CanonicalPair> {
    canonicalize_elems(&a.to_vec(), &b.to_vec())
}

pub(crate) fn canonicalize_elems(a: &[usize], b: &[usize]) -> Result<CanonicalPair> {
    let shift = a
        .iter()
        .chain(b)
        .copied()
        .min()
        .ok_or_else(|| Error::usage("cannot canonicalize a pair with A and B both empty"))?;
    let scale = a.iter().chain(b).fold(0, |g, &x| gcd(g, x - shift)).max(1);
    let map = |s: &[usize]| -> Vec<usize> { s.iter().map(|&x| (x - shift) / scale).collect() };
    let (ca, cb) = (map(a), map(b));
    let span = ca.iter().chain(&cb).copied().max().unwrap_or(0);
    let mirror = |s: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = s.iter().map(|&x| span - x).collect();
        v.sort_unstable();
        v
    };
    let (ra, rb) = (mirror(&ca), mirror(&cb));
    let reflected = (&ra, &rb) < (&ca, &cb);
    let (fa, fb) = if reflected { (ra, rb) } else { (ca, cb) };
    Ok(CanonicalPair {
        a: fa,
        b: fb,
        original_a: a.to_vec(),
        original_b: b.to_vec(),
        shift,
        scale,
        reflected,
        span,
    })
}

/// Default cap on `C(n+1, |A|)·C(n+1, |B|)` for [`search_size`].
pub const DEFAULT_SEARCH_BUDGET: u128 = 2_000_000_000;

fn choose(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Pairs examined by [`search_size`] before the translation reduction.
pub fn search_cost(size: SizeClass, n_max: usize) -> u128 {
    let m = n_max as u128 + 1;
    choose(m, size.size_a as u128) * choose(m, size.size_b as u128)
}

/// All `k`-element masks over `bits` bits in increasing order.
fn combinations(bits: usize, k: usize) -> Vec<u64> {
    if k > bits {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << bits;
    let mut out = Vec::new();
    let mut x = (1u64 << k) - 1;
    while x < limit {
        out.push(x);
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

fn mask_elems(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

/// Every MSTD pair with `|A| = size_a`, `|B| = size_b` inside `[0, n_max]`,
/// one representative per canonical class, sorted by canonical form.
pub fn search_size(size: SizeClass, n_max: usize, budget: u128, par: &Parallelism) -> Result<Vec<CanonicalPair>> {
    if n_max > small::MAX_N {
        return Err(Error::usage(format!("n_max={n_max} above the supported {}", small::MAX_N)));
    }
    let cost = search_cost(size, n_max);
    if cost > budget {
        return Err(Error::Budget {
            what: format!("search of size {size} up to n_max={n_max}"),
            cost,
            cap: budget,
        });
    }
    let bits = n_max + 1;
    let a_masks = combinations(bits, size.size_a);
    let b_masks = combinations(bits, size.size_b);
    let b_with_zero: Vec<u64> = b_masks.iter().copied().filter(|m| m & 1 == 1).collect();
    let found = par.map_units(a_masks.len() as u64, |i| {
        let a = a_masks[i as usize];
        // translation: some element of A∪B can be taken to be 0
        let bs = if a & 1 == 1 { &b_masks } else { &b_with_zero };
        bs.iter()
            .copied()
            .filter(|&b| small::is_mstd(a, b, n_max))
            .map(|b| (a, b))
            .collect::<Vec<_>>()
    });
    let mut classes: BTreeMap<(Vec<usize>, Vec<usize>), CanonicalPair> = BTreeMap::new();
    for (a, b) in found.into_iter().flatten() {
        let c = canonicalize_elems(&mask_elems(a), &mask_elems(b))?;
        classes.entry((c.a.clone(), c.b.clone())).or_insert(c);
    }
    Ok(classes.into_values().collect())
}

/// Three representations `a₁+b₃ = a₂+b₂ = a₃+b₁ = s` with `a₁<a₂<a₃`, `b₁<b₂<b₃`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleWitness {
    pub s: usize,
    pub a: [usize; 3],
    pub b: [usize; 3],
}

/// Some sum has at least three representations in `A × B`.
pub fn verify_triple_lemma(a: &IntSet, b: &IntSet) -> Result<bool> {
    Ok(triple_witness(a, b)?.is_some())
}

pub fn triple_witness(a: &IntSet, b: &IntSet) -> Result<Option<TripleWitness>> {
    let m = representation_multiplicities(a, b)?;
    let Some((s, _)) = m.sum_entries().find(|&(_, c)| c >= 3) else {
        return Ok(None);
    };
    let reps: Vec<usize> = a.iter().filter(|&x| x <= s && b.contains(s - x)).take(3).collect();
    Ok(Some(TripleWitness {
        s,
        a: [reps[0], reps[1], reps[2]],
        b: [s - reps[2], s - reps[1], s - reps[0]],
    }))
}

/// Representation-count bookkeeping for `|A+B|` versus `|±(A−B)|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub size_a: usize,
    pub size_b: usize,
    pub sum_size: usize,
    /// `|A − B|` (one-sided).
    pub diff_one_sided: usize,
    /// `|±(A − B)|`.
    pub diff_size: usize,
    /// `|I| = Σ_s C(|X_s|, 2)`.
    pub collisions_sum: u64,
    /// `|J| = Σ_d C(|Y_d|, 2)`.
    pub collisions_diff: u64,
    /// `M = |A||B| − |I|`.
    pub m: i64,
    /// `Σ_s (|X_s|−1)(|X_s|−2)/2`.
    pub sum_excess: u64,
    /// `Σ_d (|Y_d|−1)(|Y_d|−2)/2`.
    pub diff_excess: u64,
    /// `|(B − A) ∖ (A − B)|`.
    pub asymmetric_diffs: usize,
    /// `|A+B| = M + sum_excess`.
    pub sum_identity_holds: bool,
    /// `|A−B| = |A||B| − |J| + diff_excess`.
    pub diff_identity_holds: bool,
    /// `|A+B| − |±(A−B)| = sum_excess − diff_excess − asymmetric_diffs`.
    pub balance_identity_holds: bool,
}

impl StructureReport {
    /// `|A+B| − |±(A−B)|` rebuilt from the report's components.
    pub fn predicted_gap(&self) -> i64 {
        self.sum_excess as i64 - self.diff_excess as i64 - self.asymmetric_diffs as i64
    }
}

pub fn structure_report(a: &IntSet, b: &IntSet) -> Result<StructureReport> {
    let m = representation_multiplicities(a, b)?;
    let pairs2 = |c: u64| c * c.saturating_sub(1) / 2;
    let excess = |c: u64| if c >= 2 { (c - 1) * (c - 2) / 2 } else { 0 };
    let collisions_sum: u64 = m.sum_entries().map(|(_, c)| pairs2(c)).sum();
    let collisions_diff: u64 = m.diff_entries().map(|(_, c)| pairs2(c)).sum();
    let sum_excess: u64 = m.sum_entries().map(|(_, c)| excess(c)).sum();
    let diff_excess: u64 = m.diff_entries().map(|(_, c)| excess(c)).sum();
    let sum_size = sumset(a, b)?.count();
    let diff_one_sided = difference_set(a, b)?.count();
    let diff_size = signed_difference_set(a, b)?.count();
    let prod = (a.count() * b.count()) as i64;
    let mm = prod - collisions_sum as i64;
    let asymmetric_diffs = diff_size - diff_one_sided;
    let mut r = StructureReport {
        size_a: a.count(),
        size_b: b.count(),
        sum_size,
        diff_one_sided,
        diff_size,
        collisions_sum,
        collisions_diff,
        m: mm,
        sum_excess,
        diff_excess,
        asymmetric_diffs,
        sum_identity_holds: sum_size as i64 == mm + sum_excess as i64,
        diff_identity_holds: diff_one_sided as i64 == prod - collisions_diff as i64 + diff_excess as i64,
        balance_identity_holds: false,
    };
    r.balance_identity_holds = sum_size as i64 - diff_size as i64 == r.predicted_gap();
    Ok(r)
}

/// Sizes `(a, b)` with `a <= b <= max_size` that admit an MSTD pair in
/// `[0, n_max]` (in either role order) and are minimal coordinate-wise.
pub fn minimal_frontier(n_max: usize, max_size: usize, par: &Parallelism) -> Result<Vec<SizeClass>> {
    let mut admitted = Vec::new();
    for a in 1..=max_size {
        for b in a..=max_size {
            let s = SizeClass::new(a, b)?;
            let hit = !search_size(s, n_max, u128::MAX, par)?.is_empty()
                || (a != b && !search_size(s.swapped(), n_max, u128::MAX, par)?.is_empty());
            if hit {
                admitted.push(s);
            }
        }
    }
    let frontier = admitted
        .iter()
        .copied()
        .filter(|s| {
            !admitted
                .iter()
                .any(|t| t != s && t.size_a <= s.size_a && t.size_b <= s.size_b)
        })
        .collect();
    Ok(frontier)
}
