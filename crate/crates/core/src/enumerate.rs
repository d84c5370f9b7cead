//! Exhaustive enumeration of MSTD pairs over small universes and the exact
//! polynomial `P_n(ρ⃗)` they define.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::RhoVector;
use crate::sampler::Parallelism;
use crate::sets::{small, IntSet};

/// Default largest `n` accepted by [`enumerate_mstd_pairs`].
pub const DEFAULT_ENUM_CAP: usize = 10;

/// All MSTD pairs `(A, B)` over `{0..n}`, sorted by `(mask(A), mask(B))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MstdCatalog {
    pub n: usize,
    pub pairs: Vec<(IntSet, IntSet)>,
}

/// Number of `(A, B)` assignments visited for a universe `{0..n}`: `4^{n+1}`.
pub fn enumeration_cost(n: usize) -> u128 {
    1u128.checked_shl(2 * (n as u32 + 1)).unwrap_or(u128::MAX)
}

/// Enumerates every pair of subsets of `{0..n}` and keeps the MSTD ones.
pub fn enumerate_mstd_pairs(n: usize, cap: usize, par: &Parallelism) -> Result<MstdCatalog> {
    let limit = cap.min(small::MAX_N);
    if n > limit {
        return Err(Error::Budget {
            what: format!("enumeration at n={n}"),
            cost: enumeration_cost(n),
            cap: enumeration_cost(limit),
        });
    }
    let universe = n + 1;
    let masks = 1u64 << universe;
    let chunks = par.map_units(masks, |a| {
        (0..masks)
            .filter(|&b| small::is_mstd(a, b, n))
            .map(|b| (a, b))
            .collect::<Vec<_>>()
    });
    let pairs = chunks
        .into_iter()
        .flatten()
        .map(|(a, b)| (IntSet::from_words(universe, vec![a]), IntSet::from_words(universe, vec![b])))
        .collect();
    Ok(MstdCatalog { n, pairs })
}

impl MstdCatalog {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// One pair per line as `A | B`, preceded by a `#` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# MSTD pairs over {{0..{}}}: {}\n", self.n, self.pairs.len());
        for (a, b) in &self.pairs {
            let _ = writeln!(out, "{a} | {b}");
        }
        out
    }

    /// Parses [`Self::to_text`] output for a universe `{0..n}`.
    pub fn from_text(text: &str, n: usize) -> Result<Self> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = line
                .split_once('|')
                .ok_or_else(|| Error::usage(format!("catalog line without '|': {line:?}")))?;
            pairs.push((
                IntSet::parse_literal(a, Some(n + 1))?,
                IntSet::parse_literal(b, Some(n + 1))?,
            ));
        }
        Ok(MstdCatalog { n, pairs })
    }
}

/// Exponents `(|A|, |A∩B|, |B∖A|)` of one pair's probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub a: usize,
    pub i: usize,
    pub j: usize,
}

impl Signature {
    pub fn of(a: &IntSet, b: &IntSet) -> Result<Self> {
        let i = a.intersection(b)?.count();
        Ok(Signature {
            a: a.count(),
            i,
            j: b.count() - i,
        })
    }
}

/// `P_n(ρ⃗) = Σ count · (pρ₁)^i (p(1−ρ₁))^{a−i} ((1−p)ρ₂)^j ((1−p)(1−ρ₂))^{n+1−a−j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MstdPolynomial {
    pub n: usize,
    pub terms: BTreeMap<Signature, u64>,
}

#[derive(Serialize, Deserialize)]
struct PolyTerm {
    a: usize,
    i: usize,
    j: usize,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct PolyFile {
    n: usize,
    terms: Vec<PolyTerm>,
}

pub fn build_polynomial(catalog: &MstdCatalog) -> Result<MstdPolynomial> {
    let mut terms = BTreeMap::new();
    for (a, b) in &catalog.pairs {
        *terms.entry(Signature::of(a, b)?).or_insert(0) += 1;
    }
    Ok(MstdPolynomial { n: catalog.n, terms })
}

impl MstdPolynomial {
    pub fn zero(n: usize) -> Self {
        MstdPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// Number of MSTD pairs represented.
    pub fn pair_count(&self) -> u64 {
        self.terms.values().sum()
    }

    pub fn evaluate(&self, r: &RhoVector) -> f64 {
        let law = r.law();
        let slots = self.n + 1;
        self.terms
            .iter()
            .map(|(s, &c)| c as f64 * law.signature_weight(slots, s.a, s.i, s.j))
            .sum()
    }

    pub fn to_json(&self) -> String {
        let file = PolyFile {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(s, &count)| PolyTerm {
                    a: s.a,
                    i: s.i,
                    j: s.j,
                    count,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolyFile = serde_json::from_str(text)?;
        let mut terms = BTreeMap::new();
        for t in file.terms {
            if t.i > t.a || t.a + t.j > file.n + 1 || t.count == 0 {
                return Err(Error::usage(format!(
                    "invalid polynomial term a={} i={} j={} count={} for n={}",
                    t.a, t.i, t.j, t.count, file.n
                )));
            }
            *terms.entry(Signature { a: t.a, i: t.i, j: t.j }).or_insert(0) += t.count;
        }
        Ok(MstdPolynomial { n: file.n, terms })
    }
}

pub fn evaluate_polynomial(poly: &MstdPolynomial, r: &RhoVector) -> f64 {
    poly.evaluate(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMax {
    pub p: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub value: f64,
}

/// Scans the cube `{0, step, .., 1}³` in lexicographic order; the first
/// point attaining the maximum wins.
pub fn grid_search_max(poly: &MstdPolynomial, step: f64) -> Result<GridMax> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::usage(format!("grid step {step} must lie in (0, 1]")));
    }
    let steps = (1.0 / step).round();
    if (steps * step - 1.0).abs() > 1e-9 {
        return Err(Error::usage(format!("grid step {step} does not divide [0, 1]")));
    }
    let steps = steps as u32;
    let at = |i: u32| i as f64 / steps as f64;
    let mut best = GridMax {
        p: 0.0,
        rho1: 0.0,
        rho2: 0.0,
        value: f64::NEG_INFINITY,
    };
    for ip in 0..=steps {
        for i1 in 0..=steps {
            for i2 in 0..=steps {
                let r = RhoVector {
                    p: at(ip),
                    rho1: at(i1),
                    rho2: at(i2),
                };
                let v = poly.evaluate(&r);
                if v > best.value {
                    best = GridMax {
                        p: r.p,
                        rho1: r.rho1,
                        rho2: r.rho2,
                        value: v,
                    };
                }
            }
        }
    }
    Ok(best)
}
