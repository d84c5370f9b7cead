//! Closed-form probabilities checked against sampled frequencies.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::prob::{
    p_hat, prob_diff_missing_bound, prob_joint_event_e, prob_sum_missing, prob_zero_diff_missing, rho3,
    RhoVector,
};
use crate::sampler::{derive_seed, sample_trial_pair, Parallelism};
use crate::sets::{signed_difference_set, sumset, IntSet};

/// Checks pass at the significance of a 4σ normal deviation.
pub const Z_LIMIT: f64 = 4.0;

/// Expected count below which binomial tails are summed exactly.
const EXACT_TAIL_BELOW: f64 = 50.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPoint {
    pub p: f64,
    pub rho1: f64,
    pub rho2: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<i64>,
}

impl CheckPoint {
    fn of(r: &RhoVector, n: Option<usize>, k: Option<i64>) -> Self {
        CheckPoint {
            p: r.p,
            rho1: r.rho1,
            rho2: r.rho2,
            n,
            k,
        }
    }
}

/// One analytic-versus-empirical comparison. `z` uses the analytic
/// binomial variance. The identity row has no empirical side; its
/// `analytic` is the largest error on the grid and `point` where it occurs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub formula: String,
    pub point: CheckPoint,
    pub analytic: f64,
    pub empirical: Option<f64>,
    pub z: Option<f64>,
    /// Tail probability of the observed count under the analytic value:
    /// two-sided for equalities, upper for bounds.
    pub p_value: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaReport {
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<FormulaCheck>,
    pub all_pass: bool,
}

impl FormulaReport {
    pub fn failures(&self) -> impl Iterator<Item = &FormulaCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn by_formula<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a FormulaCheck> + 'a {
        self.checks.iter().filter(move |c| c.formula == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub grid: Vec<RhoVector>,
    pub identity_steps: usize,
    pub diff_n: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let rv = |p, a, b| RhoVector::new(p, a, b).expect("valid grid point");
        VerifyConfig {
            n: 50,
            trials: 100_000,
            seed: 0,
            grid: vec![
                rv(0.5, 0.5, 0.5),
                rv(0.5, 1.0, 0.0),
                rv(0.5, 0.0, 1.0),
                rv(0.3, 0.6, 0.2),
                rv(0.8, 0.3, 0.7),
            ],
            identity_steps: 20,
            diff_n: 60,
        }
    }
}

/// `(x̂ − π) / sqrt(π(1−π)/T)`; degenerate `π` gives 0 on an exact match and ±∞ otherwise.
pub fn binomial_z(hits: u64, trials: u64, analytic: f64) -> f64 {
    let freq = hits as f64 / trials as f64;
    let var = analytic * (1.0 - analytic) / trials as f64;
    if var <= 0.0 {
        if (freq - analytic).abs() < 1e-15 {
            0.0
        } else {
            (freq - analytic).signum() * f64::INFINITY
        }
    } else {
        (freq - analytic) / var.sqrt()
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `(P(X ≤ hits), P(X ≥ hits))` for `X ~ Binomial(trials, π)`: exact when
/// either expected count is small, normal otherwise.
pub fn binomial_tails(hits: u64, trials: u64, analytic: f64) -> (f64, f64) {
    let t = trials as f64;
    if analytic <= 0.0 || analytic >= 1.0 {
        let all = if analytic <= 0.0 { 0 } else { trials };
        return match hits.cmp(&all) {
            std::cmp::Ordering::Equal => (1.0, 1.0),
            std::cmp::Ordering::Less => (0.0, 1.0),
            std::cmp::Ordering::Greater => (1.0, 0.0),
        };
    }
    if t * analytic >= EXACT_TAIL_BELOW && t * (1.0 - analytic) >= EXACT_TAIL_BELOW {
        let z = binomial_z(hits, trials, analytic);
        return (std_normal_cdf(z), std_normal_cdf(-z));
    }
    if t * analytic >= EXACT_TAIL_BELOW {
        let (lo, hi) = binomial_tails(trials - hits, trials, 1.0 - analytic);
        return (hi, lo);
    }
    let ratio = analytic / (1.0 - analytic);
    let mut pmf = (t * (-analytic).ln_1p()).exp();
    let mut below = 0.0;
    for i in 0..hits {
        below += pmf;
        pmf *= (t - i as f64) / (i as f64 + 1.0) * ratio;
    }
    ((below + pmf).min(1.0), (1.0 - below).max(0.0))
}

fn two_sided_p(hits: u64, trials: u64, analytic: f64) -> f64 {
    let (lo, hi) = binomial_tails(hits, trials, analytic);
    (2.0 * lo.min(hi)).min(1.0)
}

fn sampled<F>(n: usize, r: &RhoVector, trials: u64, seed: u64, par: &Parallelism, len: usize, f: F) -> Vec<u64>
where
    F: Fn(&mut [u64], &IntSet, &IntSet) + Sync + Send,
{
    let parts = par.map_chunks(trials, |start, end| {
        let mut acc = vec![0u64; len];
        for t in start..end {
            let (a, b) = sample_trial_pair(n, r, seed, t);
            f(&mut acc, &a, &b);
        }
        acc
    });
    let mut total = vec![0u64; len];
    for p in parts {
        total.iter_mut().zip(p).for_each(|(x, y)| *x += y);
    }
    total
}

fn two_sided(formula: &str, point: CheckPoint, analytic: f64, hits: u64, trials: u64) -> FormulaCheck {
    let p = two_sided_p(hits, trials, analytic);
    FormulaCheck {
        formula: formula.to_string(),
        point,
        analytic,
        empirical: Some(hits as f64 / trials as f64),
        z: Some(binomial_z(hits, trials, analytic)),
        p_value: Some(p),
        pass: p >= 2.0 * std_normal_cdf(-Z_LIMIT),
    }
}

/// Sum-missing probabilities at every `k`, the identity `1 − ρ₃ = p̂`, the
/// joint event `P(E)`, the zero-difference law and the difference bound.
pub fn verify_formulas(cfg: &VerifyConfig, par: &Parallelism) -> Result<FormulaReport> {
    let mut checks = Vec::new();
    let n = cfg.n;
    for (gi, r) in cfg.grid.iter().enumerate() {
        let seed = derive_seed(cfg.seed, gi as u64);
        let missing = sampled(n, r, cfg.trials, seed, par, 2 * n + 1, |acc, a, b| {
            let s = sumset(a, b).expect("same universe");
            for (k, slot) in acc.iter_mut().enumerate() {
                *slot += u64::from(!s.contains(k));
            }
        });
        for (k, &hits) in missing.iter().enumerate() {
            let analytic = prob_sum_missing(k, n, r)?;
            checks.push(two_sided(
                "prob_sum_missing",
                CheckPoint::of(r, Some(n), Some(k as i64)),
                analytic,
                hits,
                cfg.trials,
            ));
        }
    }

    let steps = cfg.identity_steps.max(1);
    let mut worst = (0.0f64, RhoVector::new(0.0, 0.0, 0.0)?);
    for i in 0..=steps {
        for j in 0..=steps {
            for l in 0..=steps {
                let f = |x: usize| x as f64 / steps as f64;
                let r = RhoVector::new(f(i), f(j), f(l))?;
                let err = (1.0 - rho3(&r) - p_hat(&r)).abs();
                if err > worst.0 {
                    worst = (err, r);
                }
            }
        }
    }
    checks.push(FormulaCheck {
        formula: "one_minus_rho3_equals_p_hat".into(),
        point: CheckPoint::of(&worst.1, None, None),
        analytic: worst.0,
        empirical: None,
        z: None,
        p_value: None,
        pass: worst.0 < 1e-12,
    });

    for (gi, r) in cfg.grid.iter().enumerate() {
        let seed = derive_seed(cfg.seed, 100 + gi as u64);
        let trials = cfg.trials * 10;
        let hits = sampled(2, r, trials, seed, par, 1, |acc, a, b| {
            let e = |x: usize, y: usize| (a.contains(x) && b.contains(y)) || (a.contains(y) && b.contains(x));
            acc[0] += u64::from(e(0, 1) && e(0, 2));
        })[0];
        checks.push(two_sided("prob_joint_event_e", CheckPoint::of(r, None, None), prob_joint_event_e(r), hits, trials));
    }

    let dn = cfg.diff_n;
    for (gi, r) in cfg.grid.iter().enumerate() {
        let seed = derive_seed(cfg.seed, 200 + gi as u64);
        let ks = [(dn / 4) as i64, (3 * dn / 4) as i64];
        let counts = sampled(dn, r, cfg.trials, seed, par, 3, |acc, a, b| {
            let d = signed_difference_set(a, b).expect("same universe");
            acc[0] += u64::from(!d.contains(0));
            acc[1] += u64::from(!d.contains(ks[0]));
            acc[2] += u64::from(!d.contains(ks[1]));
        });
        checks.push(two_sided(
            "prob_zero_diff_missing",
            CheckPoint::of(r, Some(dn), Some(0)),
            prob_zero_diff_missing(dn, r),
            counts[0],
            cfg.trials,
        ));
        for (slot, &k) in ks.iter().enumerate() {
            let bound = prob_diff_missing_bound(k, dn, r)?;
            let hits = counts[slot + 1];
            let upper = binomial_tails(hits, cfg.trials, bound).1;
            checks.push(FormulaCheck {
                formula: "prob_diff_missing_bound".into(),
                point: CheckPoint::of(r, Some(dn), Some(k)),
                analytic: bound,
                empirical: Some(hits as f64 / cfg.trials as f64),
                z: Some(binomial_z(hits, cfg.trials, bound)),
                p_value: Some(upper),
                pass: upper >= std_normal_cdf(-Z_LIMIT),
            });
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(FormulaReport {
        trials: cfg.trials,
        seed: cfg.seed,
        checks,
        all_pass,
    })
}
