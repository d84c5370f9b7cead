//! The correlated-pair probability model and its closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::IntSet;

/// `(p, ρ₁, ρ₂)`: each element joins `A` with probability `p`, then joins `B`
/// with probability `ρ₁` if it is in `A` and `ρ₂` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoVector {
    pub p: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl RhoVector {
    pub fn new(p: f64, rho1: f64, rho2: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("rho1", rho1), ("rho2", rho2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::usage(format!(
                    "invalid probability {name}={v}: must lie in [0, 1]"
                )));
            }
        }
        Ok(RhoVector { p, rho1, rho2 })
    }

    pub fn rho3(&self) -> f64 {
        rho3(self)
    }

    pub fn rho4(&self) -> f64 {
        rho4(self)
    }

    pub fn p_hat(&self) -> f64 {
        p_hat(self)
    }

    pub fn law(&self) -> ElementLaw {
        ElementLaw::from(*self)
    }

    /// Parameters at which no correlated MSTD pair can occur:
    /// `p ∈ {0, 1}` or `ρ₁ + ρ₂ ∈ {0, 2}`.
    pub fn in_zero_set(&self) -> bool {
        let s = self.rho1 + self.rho2;
        self.p == 0.0 || self.p == 1.0 || s == 0.0 || s == 2.0
    }
}

/// Joint membership law of a single element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementLaw {
    /// In both `A` and `B`.
    pub q_ab: f64,
    /// In `A` only.
    pub q_ao: f64,
    /// In `B` only.
    pub q_ob: f64,
    /// In neither.
    pub q_oo: f64,
}

impl From<RhoVector> for ElementLaw {
    fn from(r: RhoVector) -> Self {
        ElementLaw {
            q_ab: r.p * r.rho1,
            q_ao: r.p * (1.0 - r.rho1),
            q_ob: (1.0 - r.p) * r.rho2,
            q_oo: (1.0 - r.p) * (1.0 - r.rho2),
        }
    }
}

impl ElementLaw {
    /// Probability of a fixed assignment with `i` elements in `A∩B`,
    /// `a - i` in `A` only, `j` in `B` only and the rest of `slots` in neither.
    pub fn signature_weight(&self, slots: usize, a: usize, i: usize, j: usize) -> f64 {
        debug_assert!(i <= a && a + j <= slots);
        self.q_ab.powi(i as i32)
            * self.q_ao.powi((a - i) as i32)
            * self.q_ob.powi(j as i32)
            * self.q_oo.powi((slots - a - j) as i32)
    }
}

/// `ρ₃ = (1−ρ₁)²p² + 2(1−ρ₂)p(1−p) + (1−p)²`: the chance that neither
/// `a + b` nor `b + a` is realized by a fixed pair of distinct elements.
pub fn rho3(r: &RhoVector) -> f64 {
    let (p, q) = (r.p, 1.0 - r.p);
    let v = (1.0 - r.rho1).powi(2) * p * p + 2.0 * (1.0 - r.rho2) * p * q + q * q;
    v.clamp(0.0, 1.0)
}

/// `ρ₄ = (1−ρ₁)p + (1−p)`: the chance that `a + a` is not realized.
pub fn rho4(r: &RhoVector) -> f64 {
    (1.0 - r.rho1) * r.p + (1.0 - r.p)
}

/// `p̂ = p²(2ρ₁−ρ₁²) + 2p(1−p)ρ₂`, the distinct-element collision probability.
pub fn p_hat(r: &RhoVector) -> f64 {
    let p = r.p;
    p * p * (2.0 * r.rho1 - r.rho1 * r.rho1) + 2.0 * p * (1.0 - p) * r.rho2
}

/// Exact `P(k ∉ A+B)` for `0 <= k <= 2n`.
pub fn prob_sum_missing(k: usize, n: usize, r: &RhoVector) -> Result<f64> {
    if k > 2 * n {
        return Err(Error::usage(format!("sum index {k} outside [0, {}]", 2 * n)));
    }
    Ok(if k % 2 == 1 {
        let e = k.div_ceil(2).min((2 * n - k).div_ceil(2));
        rho3(r).powi(e as i32)
    } else {
        let e = (k / 2).min((2 * n - k) / 2);
        rho4(r) * rho3(r).powi(e as i32)
    })
}

/// Upper bound on `P(k ∉ ±(A−B))` for `1 <= |k| <= n`:
/// `ρ₃^{n/3}` when `|k| <= n/2`, else `ρ₃^{n−|k|}`.
pub fn prob_diff_missing_bound(k: i64, n: usize, r: &RhoVector) -> Result<f64> {
    let m = k.unsigned_abs() as usize;
    if m == 0 {
        return Err(Error::usage(
            "difference 0 has no bound here: it is missing exactly when A and B are disjoint",
        ));
    }
    if m > n {
        return Err(Error::usage(format!("difference index {k} outside [-{n}, {n}]")));
    }
    let r3 = rho3(r);
    Ok(if 2 * m <= n {
        r3.powf(n as f64 / 3.0)
    } else {
        r3.powi((n - m) as i32)
    })
}

/// Exact `P(0 ∉ ±(A−B)) = (1 − pρ₁)^{n+1}`.
pub fn prob_zero_diff_missing(n: usize, r: &RhoVector) -> f64 {
    (1.0 - r.p * r.rho1).powi((n + 1) as i32)
}

/// `P(E)` for distinct `a, b, c`: both `{a,b}` and `{a,c}` realize a sum.
pub fn prob_joint_event_e(r: &RhoVector) -> f64 {
    let (p, q, r1, r2) = (r.p, 1.0 - r.p, r.rho1, r.rho2);
    p * q * q * r2 * r2
        + 2.0 * p * p * q * r1 * r2 * (2.0 - r1)
        + p.powi(3) * r1 * (1.0 + r1 - r1 * r1)
        + p * p * q * r2
}

/// Probability of drawing exactly `(A, B)` from `I_n`, where `n + 1` is the
/// sets' universe size.
pub fn pair_probability(a: &IntSet, b: &IntSet, r: &RhoVector) -> Result<f64> {
    let both = a.intersection(b)?.count();
    let size_a = a.count();
    let b_only = b.count() - both;
    Ok(r.law().signature_weight(a.universe_size(), size_a, both, b_only))
}
