//! Fringe tuples `(L, L′, R, R′; k)`: the edge structure that certifies a
//! pair as MSTD once its sumset fills the middle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{ElementLaw, RhoVector};
use crate::sampler::{derive_seed, trial_rng, ClassSampler, EstimateWithCI, Parallelism};
use crate::sets::{small, sumset, IntSet, SumDiffKernel};

/// Four subsets of `[0, k]` and the order `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FringeTuple {
    pub l: IntSet,
    pub lp: IntSet,
    pub r: IntSet,
    pub rp: IntSet,
    pub k: usize,
}

#[derive(Serialize, Deserialize)]
struct FringeFile {
    #[serde(rename = "L")]
    l: String,
    #[serde(rename = "Lp")]
    lp: String,
    #[serde(rename = "R")]
    r: String,
    #[serde(rename = "Rp")]
    rp: String,
    k: usize,
}

impl Serialize for FringeTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FringeFile {
            l: self.l.to_string(),
            lp: self.lp.to_string(),
            r: self.r.to_string(),
            rp: self.rp.to_string(),
            k: self.k,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FringeTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = FringeFile::deserialize(d)?;
        FringeTuple::from_literals(&f.l, &f.lp, &f.r, &f.rp, f.k).map_err(serde::de::Error::custom)
    }
}

impl FringeTuple {
    pub fn new(l: IntSet, lp: IntSet, r: IntSet, rp: IntSet, k: usize) -> Result<Self> {
        let fit = |s: IntSet| s.rebase(k + 1);
        Ok(FringeTuple {
            l: fit(l)?,
            lp: fit(lp)?,
            r: fit(r)?,
            rp: fit(rp)?,
            k,
        })
    }

    pub fn from_literals(l: &str, lp: &str, r: &str, rp: &str, k: usize) -> Result<Self> {
        let parse = |t: &str| IntSet::parse_literal(t, Some(k + 1));
        Ok(FringeTuple {
            l: parse(l)?,
            lp: parse(lp)?,
            r: parse(r)?,
            rp: parse(rp)?,
            k,
        })
    }

    /// Built from `u64` masks; requires `k < 64`.
    pub fn from_masks(l: u64, lp: u64, r: u64, rp: u64, k: usize) -> Self {
        let s = |m: u64| IntSet::from_words(k + 1, vec![m]);
        FringeTuple {
            l: s(l),
            lp: s(lp),
            r: s(r),
            rp: s(rp),
            k,
        }
    }

    /// The tuple cut down to order `j <= k`.
    pub fn truncate(&self, j: usize) -> FringeTuple {
        assert!(j <= self.k);
        FringeTuple {
            l: self.l.clip(j),
            lp: self.lp.clip(j),
            r: self.r.clip(j),
            rp: self.rp.clip(j),
            k: j,
        }
    }

    /// `(|(L+L′)∩[0,k]| + |(R+R′)∩[0,k]|, 2|((L+R′) ∪ (L′+R)) ∩ [0,k]|)`.
    pub fn sides(&self) -> (usize, usize) {
        let k = self.k;
        let clip = |x: &IntSet, y: &IntSet| sumset(x, y).expect("same universe").clip(k);
        let lhs = clip(&self.l, &self.lp).count() + clip(&self.r, &self.rp).count();
        let cross = clip(&self.l, &self.rp).union(&clip(&self.lp, &self.r)).expect("same universe");
        (lhs, 2 * cross.count())
    }

    /// Sums `L + L′` and `R + R′` restricted to `[0, k]`.
    fn edge_sums(&self) -> (IntSet, IntSet) {
        let k = self.k;
        (
            sumset(&self.l, &self.lp).expect("same universe").clip(k),
            sumset(&self.r, &self.rp).expect("same universe").clip(k),
        )
    }
}

/// The strict fringe inequality.
pub fn is_mstd_fringe(t: &FringeTuple) -> bool {
    let (lhs, rhs) = t.sides();
    lhs > rhs
}

/// The same inequality with `≥`.
pub fn is_weak_mstd_fringe(t: &FringeTuple) -> bool {
    let (lhs, rhs) = t.sides();
    lhs >= rhs
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if 2 * k >= n {
        return Err(Error::usage(format!("fringe order k={k} must satisfy k < n/2 (n={n})")));
    }
    Ok(())
}

fn check_pair(a: &IntSet, b: &IntSet, n: usize) -> Result<()> {
    if a.universe_size() != b.universe_size() {
        return Err(Error::UniverseMismatch {
            left: a.universe_size(),
            right: b.universe_size(),
        });
    }
    if a.universe_size() != n + 1 {
        return Err(Error::usage(format!(
            "sets live in a universe of {} elements, expected n+1={}",
            a.universe_size(),
            n + 1
        )));
    }
    Ok(())
}

/// `(A∩[0,k], B∩[0,k], (n−A)∩[0,k], (n−B)∩[0,k]; k)`.
pub fn fringe_profile(a: &IntSet, b: &IntSet, n: usize, k: usize) -> Result<FringeTuple> {
    check_pair(a, b, n)?;
    check_order(n, k)?;
    Ok(FringeTuple {
        l: a.clip(k),
        lp: b.clip(k),
        r: a.reflect().clip(k),
        rp: b.reflect().clip(k),
        k,
    })
}

/// `[k+1, 2n−k−1] ⊆ A + B`.
pub fn is_rich_pair(a: &IntSet, b: &IntSet, n: usize, k: usize) -> Result<bool> {
    check_pair(a, b, n)?;
    check_order(n, k)?;
    Ok(sumset(a, b)?.contains_range(k + 1, 2 * n - k - 1))
}

/// The smallest `k <= k_max` at which the pair's profile is a strict MSTD
/// fringe and the pair is rich.
pub fn minimal_fringe_order(a: &IntSet, b: &IntSet, n: usize, k_max: usize) -> Result<Option<usize>> {
    check_pair(a, b, n)?;
    check_order(n, k_max)?;
    let sums = sumset(a, b)?;
    for k in 0..=k_max {
        let t = fringe_profile(a, b, n, k)?;
        if is_mstd_fringe(&t) && sums.contains_range(k + 1, 2 * n - k - 1) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `small < big` in the fringe partial order: `small` is the truncation of
/// `big` to its order `j < k`, and `[j, k]` lies in both `L+L′` and `R+R′`.
pub fn fringe_partial_leq(small: &FringeTuple, big: &FringeTuple) -> bool {
    let (j, k) = (small.k, big.k);
    if j >= k || big.truncate(j) != *small {
        return false;
    }
    let (ll, rr) = big.edge_sums();
    ll.contains_range(j, k) && rr.contains_range(j, k)
}

/// True when `t` is a fringe (strict, or weak if `weak`) with no fringe of
/// the same kind below it in the partial order.
pub fn is_minimal_fringe(t: &FringeTuple, weak: bool) -> bool {
    let pred = |x: &FringeTuple| if weak { is_weak_mstd_fringe(x) } else { is_mstd_fringe(x) };
    if !pred(t) {
        return false;
    }
    (0..t.k).all(|j| {
        let s = t.truncate(j);
        !(pred(&s) && fringe_partial_leq(&s, t))
    })
}

/// Exact probability that a pair over a universe with more than `2k+1`
/// elements has profile `t`.
pub fn profile_probability(t: &FringeTuple, r: &RhoVector) -> f64 {
    let law = r.law();
    let class = |x: bool, y: bool, law: &ElementLaw| match (x, y) {
        (true, true) => law.q_ab,
        (true, false) => law.q_ao,
        (false, true) => law.q_ob,
        (false, false) => law.q_oo,
    };
    (0..=t.k)
        .map(|e| class(t.l.contains(e), t.lp.contains(e), &law) * class(t.r.contains(e), t.rp.contains(e), &law))
        .product()
}

/// `P(profile) · P(rich | profile)` at a finite `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeEstimate {
    pub tuple: FringeTuple,
    pub rho: RhoVector,
    pub n_used: usize,
    pub profile_prob: f64,
    pub richness_given_profile: EstimateWithCI,
    pub product: f64,
}

/// Smallest `n` accepted for limit estimation at order `k`.
pub fn min_limit_n(k: usize) -> usize {
    20 * k + 100
}

/// Default `n` for limit estimation at order `k`.
pub fn default_limit_n(k: usize) -> usize {
    min_limit_n(k).max(200)
}

/// Estimates the limiting probability of "profile `t` and rich".
///
/// The profile factor is exact. The richness factor is Monte Carlo with the
/// `2(k+1)` fringe elements pinned to `t` and only the middle sampled.
pub fn estimate_fringe_limit(
    t: &FringeTuple,
    r: &RhoVector,
    n: Option<usize>,
    trials: u64,
    seed: u64,
    par: &Parallelism,
) -> Result<FringeEstimate> {
    let k = t.k;
    let n = n.unwrap_or_else(|| default_limit_n(k));
    if n < min_limit_n(k) {
        return Err(Error::usage(format!(
            "n={n} too small for order k={k}: need n >= {}",
            min_limit_n(k)
        )));
    }
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    let profile_prob = profile_probability(t, r);
    let universe = n + 1;
    let words = universe.div_ceil(64);
    let (mut a0, mut b0) = (vec![0u64; words], vec![0u64; words]);
    let pin = |set: &IntSet, buf: &mut Vec<u64>, mirrored: bool| {
        for e in set.iter() {
            let x = if mirrored { n - e } else { e };
            buf[x / 64] |= 1 << (x % 64);
        }
    };
    pin(&t.l, &mut a0, false);
    pin(&t.lp, &mut b0, false);
    pin(&t.r, &mut a0, true);
    pin(&t.rp, &mut b0, true);

    let sampler = ClassSampler::new(r);
    let (lo, hi) = (k + 1, 2 * n - k - 1);
    let hits: u64 = par
        .map_chunks(trials, |start, end| {
            let mut kernel = SumDiffKernel::new();
            let (mut a, mut b) = (a0.clone(), b0.clone());
            let mut count = 0u64;
            for tr in start..end {
                a.copy_from_slice(&a0);
                b.copy_from_slice(&b0);
                sampler.fill(&mut trial_rng(seed, tr), k + 1, n - k, &mut a, &mut b);
                kernel.sum_into_buffer(&a, &b, universe);
                count += u64::from(kernel.last_sums_cover(lo, hi));
            }
            count
        })
        .into_iter()
        .sum();
    let rich = EstimateWithCI::from_counts(hits, trials, seed, n, *r);
    Ok(FringeEstimate {
        tuple: t.clone(),
        rho: *r,
        n_used: n,
        profile_prob,
        product: profile_prob * rich.point,
        richness_given_profile: rich,
    })
}

/// Largest order for which the exhaustive tuple search is offered.
pub const MAX_EXHAUSTIVE_K: usize = 4;

/// Every minimal fringe tuple of order exactly `k` (strict, or weak if
/// `weak`), by exhaustive search over the `4^{2(k+1)}` tuples.
pub fn search_fringes(k: usize, weak: bool) -> Result<Vec<FringeTuple>> {
    if k > MAX_EXHAUSTIVE_K {
        return Err(Error::Budget {
            what: format!("exhaustive fringe search at k={k}"),
            cost: 1u128 << (4 * (k + 1)),
            cap: 1u128 << (4 * (MAX_EXHAUSTIVE_K + 1)),
        });
    }
    let m = 1u64 << (k + 1);
    let clip = m - 1;
    let mut out = Vec::new();
    for l in 0..m {
        for lp in 0..m {
            let ll = (small::sumset(l, lp) & clip).count_ones();
            for r in 0..m {
                let lr_part = small::sumset(lp, r) & clip;
                for rp in 0..m {
                    let rr = (small::sumset(r, rp) & clip).count_ones();
                    let cross = (small::sumset(l, rp) & clip) | lr_part;
                    let (lhs, rhs) = (ll + rr, 2 * cross.count_ones());
                    let ok = if weak { lhs >= rhs } else { lhs > rhs };
                    if ok {
                        let t = FringeTuple::from_masks(l, lp, r, rp, k);
                        if is_minimal_fringe(&t, weak) {
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The shipped list of known fringe tuples.
pub fn curated_fringes() -> Vec<FringeTuple> {
    serde_json::from_str(include_str!("../data/fringes.json")).expect("valid fringe data")
}

/// Whether richness is possible at all given profile `t`: with every middle
/// element in both sets, does `A + B` cover `[k+1, 2n−k−1]`?
pub fn richness_feasible(t: &FringeTuple) -> bool {
    let k = t.k;
    // the middle is represented by a band of width k+2 on each side
    let n = 4 * k + 4;
    let mut a = IntSet::new(n + 1);
    let mut b = IntSet::new(n + 1);
    for e in t.l.iter() {
        a.insert(e);
    }
    for e in t.lp.iter() {
        b.insert(e);
    }
    for e in t.r.iter() {
        a.insert(n - e);
    }
    for e in t.rp.iter() {
        b.insert(n - e);
    }
    for e in k + 1..n - k {
        a.insert(e);
        b.insert(e);
    }
    sumset(&a, &b).expect("same universe").contains_range(k + 1, 2 * n - k - 1)
}

/// How a lower bound certifies the MSTD property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRoute {
    /// Strict fringe and richness.
    Strict,
    /// Weak fringe, richness and `A∩B = ∅` (forced when `ρ₁ = 0`).
    WeakDisjoint,
    /// The parameters lie in the zero set; the bound is 0.
    ZeroSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub rho: RhoVector,
    pub route: BoundRoute,
    pub value: f64,
    pub terms: Vec<FringeEstimate>,
}

#[derive(Clone, Copy, Debug)]
pub struct LowerBoundConfig {
    /// Largest fringe order considered.
    pub k_cap: usize,
    /// Richness trials per term.
    pub trials: u64,
    pub seed: u64,
    /// Most terms summed.
    pub max_terms: usize,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        LowerBoundConfig {
            k_cap: 12,
            trials: 20_000,
            seed: 0,
            max_terms: 12,
        }
    }
}

/// Either tuple is the other's truncation (so their events can overlap).
fn nested(x: &FringeTuple, y: &FringeTuple) -> bool {
    let (s, b) = if x.k <= y.k { (x, y) } else { (y, x) };
    b.truncate(s.k) == *s
}

/// A lower bound on the limit `P(ρ⃗)` as a sum over fringe tuples whose
/// "profile and rich" events are pairwise disjoint.
///
/// Candidates are the shipped tuples plus an exhaustive search up to
/// order `min(k_cap, 4)`. Each term is a finite-`n` estimate, so the total
/// carries Monte-Carlo error.
pub fn lower_bound_p(r: &RhoVector, cfg: &LowerBoundConfig, par: &Parallelism) -> Result<LowerBound> {
    if r.in_zero_set() {
        return Ok(LowerBound {
            rho: *r,
            route: BoundRoute::ZeroSet,
            value: 0.0,
            terms: Vec::new(),
        });
    }
    let weak = r.rho1 == 0.0;
    let route = if weak { BoundRoute::WeakDisjoint } else { BoundRoute::Strict };
    let pred = |t: &FringeTuple| if weak { is_weak_mstd_fringe(t) } else { is_mstd_fringe(t) };

    let mut candidates: Vec<FringeTuple> = curated_fringes()
        .into_iter()
        .filter(|t| t.k <= cfg.k_cap && pred(t))
        .collect();
    for k in 0..=cfg.k_cap.min(MAX_EXHAUSTIVE_K) {
        candidates.extend(search_fringes(k, weak)?);
    }
    let mut scored: Vec<(f64, FringeTuple)> = candidates
        .into_iter()
        .map(|t| (profile_probability(&t, r), t))
        .filter(|(p, t)| *p > 0.0 && richness_feasible(t))
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.k.cmp(&y.1.k)));
    scored.dedup_by(|x, y| x.1 == y.1);

    let mut terms: Vec<FringeEstimate> = Vec::new();
    let attempts = 4 * cfg.max_terms;
    for (idx, (_, t)) in scored.iter().enumerate().take(attempts) {
        if terms.len() >= cfg.max_terms {
            break;
        }
        if terms.iter().any(|e| nested(&e.tuple, t)) {
            continue;
        }
        let seed = derive_seed(cfg.seed, idx as u64);
        let est = estimate_fringe_limit(t, r, None, cfg.trials, seed, par)?;
        if est.product > 0.0 {
            terms.push(est);
        }
    }
    let value = terms.iter().map(|e| e.product).sum();
    Ok(LowerBound {
        rho: *r,
        route,
        value,
        terms,
    })
}
