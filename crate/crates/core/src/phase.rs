//! Sum and difference set sizes when the density decays with `N`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{p_hat, RhoVector};
use crate::sampler::{derive_seed, estimate_sum_diff_stats, Parallelism, SumDiffSummary};
use crate::sets::{representation_multiplicities, IntSet};

/// `g(x) = 2(e^{−x} − (1 − x))/x`.
pub fn g_function(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::usage(format!("g is defined for finite x > 0, got {x}")));
    }
    Ok(if x < 1e-6 {
        x - x * x / 3.0 + x * x * x / 12.0
    } else {
        2.0 * ((-x).exp_m1() + x) / x
    })
}

fn binomial(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= m - i;
        acc /= i + 1;
    }
    acc
}

/// `ξ₁,ₖ(N) = Σ_{n=2k}^{2N−2k} C(min(⌊n/2⌋, ⌊(2N−n)/2⌋), k)`: the number of
/// `k`-sets of pairwise disjoint two-element subsets of an `N`-element
/// interval that share a common sum.
pub fn count_xi1(n: u64, k: u64) -> Result<BigUint> {
    if k < 1 || n < 2 * k {
        return Err(Error::usage(format!("xi_1,k needs N >= 2k >= 2, got N={n}, k={k}")));
    }
    let mut total = BigUint::zero();
    for s in 2 * k..=2 * n - 2 * k {
        total += binomial((s / 2).min((2 * n - s) / 2), k);
    }
    Ok(total)
}

/// `2 N^{k+1} / (2^k (k+1)!)`.
pub fn xi1_asymptotic(n: u64, k: u32) -> f64 {
    let fact: f64 = (1..=k + 1).map(f64::from).product();
    2.0 * (n as f64).powi(k as i32 + 1) / (2f64.powi(k as i32) * fact)
}

/// Per-sum and per-difference counts of unordered element pairs `{a, b}`
/// for which `a∈A, b∈B` or `b∈A, a∈B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionProfile {
    /// `s ↦ r_s`, pairs with `a + b = s` (including `a = b`).
    pub sums: BTreeMap<usize, u64>,
    /// `d ↦ r'_d` for `d >= 1`, pairs with `|a − b| = d`.
    pub diffs: BTreeMap<usize, u64>,
}

impl CollisionProfile {
    /// `X_k = Σ_s C(r_s, k)`.
    pub fn x_k(&self, k: u64) -> BigUint {
        self.sums.values().map(|&r| binomial(r, k)).sum()
    }

    /// `Σ_d C(r'_d, k)`.
    pub fn x_k_diff(&self, k: u64) -> BigUint {
        self.diffs.values().map(|&r| binomial(r, k)).sum()
    }
}

pub fn collision_profile(a: &IntSet, b: &IntSet) -> Result<CollisionProfile> {
    let both = a.intersection(b)?;
    let m = representation_multiplicities(a, b)?;
    let mc = representation_multiplicities(&both, &both)?;
    let mut sums = BTreeMap::new();
    for (s, x) in m.sum_entries() {
        let diag = u64::from(s % 2 == 0 && both.contains(s / 2));
        // unordered pairs counted from both orientations
        let twice = (mc.sum(s) - diag) / 2;
        let r = x - twice;
        if r > 0 {
            sums.insert(s, r);
        }
    }
    let mut diffs = BTreeMap::new();
    let n = a.universe_size().saturating_sub(1);
    for d in 1..=n {
        let d = d as i64;
        let r = m.diff(d) + m.diff(-d) - mc.diff(d);
        if r > 0 {
            diffs.insert(d as usize, r);
        }
    }
    Ok(CollisionProfile { sums, diffs })
}

/// `E[X_1]` over `I_N = {0..N}`: `C(N+1, 2)·p̂ + (N+1)·pρ₁`.
pub fn expected_x1(n: usize, r: &RhoVector) -> f64 {
    let m = (n + 1) as f64;
    m * (m - 1.0) / 2.0 * p_hat(r) + m * r.p * r.rho1
}

/// The smallest `p ∈ [0, 1]` with `p̂(p, ρ₁, ρ₂) = target`, by bisection.
pub fn solve_p_for_p_hat(target: f64, rho1: f64, rho2: f64) -> Result<f64> {
    RhoVector::new(0.0, rho1, rho2)?;
    let a = 2.0 * rho1 - rho1 * rho1 - 2.0 * rho2;
    let b = 2.0 * rho2;
    let f = |p: f64| a * p * p + b * p;
    // p̂ increases on [0, peak]
    let peak = if a < 0.0 { (-b / (2.0 * a)).min(1.0) } else { 1.0 };
    let max = f(peak);
    if !(0.0..=max).contains(&target) {
        return Err(Error::usage(format!(
            "target p_hat={target} unreachable for rho1={rho1}, rho2={rho2} (max {max})"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, peak);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// How `p̂` (or `p`) depends on `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// Constant `p`.
    FixedP { p: f64 },
    /// `p̂ = N^{−alpha}`.
    PHatPower { alpha: f64 },
    /// `p̂ = c/N`.
    PHatOverN { c: f64 },
}

impl FromStr for Regime {
    type Err = Error;

    /// `fixed:<p>`, `pow:<alpha>` or `chat:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, val) = s
            .split_once(':')
            .ok_or_else(|| Error::usage(format!("regime {s:?} must look like chat:1.0, pow:1.5 or fixed:0.1")))?;
        let v: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("bad regime parameter {val:?}")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::usage(format!("regime parameter must be positive, got {v}")));
        }
        match kind.trim() {
            "fixed" => Ok(Regime::FixedP { p: v }),
            "pow" => Ok(Regime::PHatPower { alpha: v }),
            "chat" => Ok(Regime::PHatOverN { c: v }),
            other => Err(Error::usage(format!("unknown regime kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::FixedP { p } => write!(f, "fixed:{p}"),
            Regime::PHatPower { alpha } => write!(f, "pow:{alpha}"),
            Regime::PHatOverN { c } => write!(f, "chat:{c}"),
        }
    }
}

/// Default lower limit on `N·p` enforced by [`DecaySpec::resolve`].
pub const DEFAULT_MIN_NP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySpec {
    pub regime: Regime,
    pub rho1: f64,
    pub rho2: f64,
    /// Smallest admissible `N·p`, the finite stand-in for `1/N = o(p)`.
    pub min_np: f64,
}

impl DecaySpec {
    pub fn new(regime: Regime, rho1: f64, rho2: f64) -> Result<Self> {
        RhoVector::new(0.0, rho1, rho2)?;
        let s = rho1 + rho2;
        if !(s > 0.0 && s < 2.0) {
            return Err(Error::usage(format!("decay needs 0 < rho1 + rho2 < 2, got {s}")));
        }
        Ok(DecaySpec {
            regime,
            rho1,
            rho2,
            min_np: DEFAULT_MIN_NP,
        })
    }

    /// Target `p̂` at `N` (for the fixed-`p` regime, the implied value).
    pub fn target_p_hat(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self.regime {
            Regime::FixedP { p } => p_hat(&RhoVector {
                p,
                rho1: self.rho1,
                rho2: self.rho2,
            }),
            Regime::PHatPower { alpha } => nf.powf(-alpha),
            Regime::PHatOverN { c } => c / nf,
        }
    }

    /// The correlated law at `N`; fails if `p ∉ (0, 1)` or `N·p < min_np`.
    pub fn resolve(&self, n: usize) -> Result<RhoVector> {
        if n == 0 {
            return Err(Error::usage("N must be positive"));
        }
        let p = match self.regime {
            Regime::FixedP { p } => p,
            _ => solve_p_for_p_hat(self.target_p_hat(n), self.rho1, self.rho2)?,
        };
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::usage(format!("{} gives p={p} at N={n}, outside (0, 1)", self.regime)));
        }
        if (n as f64) * p < self.min_np {
            return Err(Error::usage(format!(
                "{} gives N*p={} at N={n}, below the minimum {}",
                self.regime,
                n as f64 * p,
                self.min_np
            )));
        }
        RhoVector::new(p, self.rho1, self.rho2)
    }
}

/// One row of a phase scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
    pub p_hat: f64,
    pub trials: u64,
    pub mean_s: f64,
    pub sd_s: f64,
    pub mean_d: f64,
    pub sd_d: f64,
    /// Average of per-trial `𝒟/𝒮`.
    pub mean_ratio: f64,
    pub ratio_of_means: f64,
    pub mean_sc: f64,
    pub mean_dc: f64,
    pub mstd_freq: f64,
}

impl PhaseRow {
    fn from_summary(s: &SumDiffSummary) -> Self {
        PhaseRow {
            n: s.n,
            p: s.rho.p,
            p_hat: p_hat(&s.rho),
            trials: s.trials,
            mean_s: s.sum_size.mean,
            sd_s: s.sum_size.std_dev,
            mean_d: s.diff_size.mean,
            sd_d: s.diff_size.std_dev,
            mean_ratio: s.mean_ratio,
            ratio_of_means: s.ratio_of_means,
            mean_sc: s.sum_complement.mean,
            mean_dc: s.diff_complement.mean,
            mstd_freq: s.mstd_frequency,
        }
    }
}

/// Monte-Carlo statistics at each `N`; the seed for `N` is derived from
/// `seed` and `N`, so rows do not depend on which other `N` are scanned.
pub fn phase_scan(spec: &DecaySpec, ns: &[usize], trials: u64, seed: u64, par: &Parallelism) -> Result<Vec<PhaseRow>> {
    let laws = ns.iter().map(|&n| spec.resolve(n)).collect::<Result<Vec<_>>>()?;
    ns.iter()
        .zip(laws)
        .map(|(&n, r)| {
            let s = estimate_sum_diff_stats(n, &r, trials, derive_seed(seed, n as u64), par)?;
            Ok(PhaseRow::from_summary(&s))
        })
        .collect()
}

pub const CSV_HEADER: &str =
    "N,p,p_hat,trials,mean_S,sd_S,mean_D,sd_D,mean_ratio,ratio_of_means,mean_Sc,mean_Dc,mstd_freq";

pub fn rows_to_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.p_hat,
            r.trials,
            r.mean_s,
            r.sd_s,
            r.mean_d,
            r.sd_d,
            r.mean_ratio,
            r.ratio_of_means,
            r.mean_sc,
            r.mean_dc,
            r.mstd_freq
        );
    }
    out
}

/// Parses a list like `1e3,1e4,100000`.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().map_err(|_| Error::usage(format!("bad N value {t:?}")))?;
            if !(v >= 1.0 && v.fract() == 0.0 && v <= crate::sets::MAX_UNIVERSE as f64) {
                return Err(Error::usage(format!("N must be a positive integer up to 2^20, got {t}")));
            }
            Ok(v as usize)
        })
        .collect()
}
