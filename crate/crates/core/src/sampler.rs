//! Seeded sampling of correlated pairs and Monte-Carlo estimators.
//!
//! Trial `i` of a run with seed `s` draws from ChaCha8 keyed by `s` on
//! stream `i`, so every trial's pair is a pure function of `(s, i)`. Trials
//! are grouped into fixed-size chunks whose partial results are combined in
//! chunk order, which makes reports identical for any worker count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::RhoVector;
use crate::sets::{IntSet, SumDiffKernel, SumDiffStats};

/// Trials per work unit.
pub const CHUNK: u64 = 2048;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Worker-count control shared by every estimator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Parallelism {
    /// `None` uses the global pool; `Some(1)` runs on the calling thread.
    pub threads: Option<usize>,
}

impl Parallelism {
    pub fn serial() -> Self {
        Parallelism { threads: Some(1) }
    }

    pub fn with_threads(threads: usize) -> Self {
        Parallelism {
            threads: Some(threads.max(1)),
        }
    }

    /// Evaluates `f` on every index in `0..units` and returns results in
    /// index order.
    pub fn map_units<T, F>(&self, units: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self.threads {
            Some(1) => (0..units).map(f).collect(),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .expect("thread pool");
                pool.install(|| (0..units).into_par_iter().map(f).collect())
            }
            None => (0..units).into_par_iter().map(f).collect(),
        }
    }

    /// Runs `f(start, end)` over `CHUNK`-sized trial ranges covering `0..trials`.
    pub fn map_chunks<T, F>(&self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, u64) -> T + Sync + Send,
    {
        let units = trials.div_ceil(CHUNK);
        self.map_units(units, |u| {
            let start = u * CHUNK;
            f(start, (start + CHUNK).min(trials))
        })
    }
}

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Mixes a seed with a label into an independent seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-element class thresholds on a uniform `u ∈ [0, 1)`:
/// `u < c1` both, `u < c2` A only, `u < c3` B only, otherwise neither.
#[derive(Clone, Copy, Debug)]
pub struct ClassSampler {
    c1: f64,
    c2: f64,
    c3: f64,
}

impl ClassSampler {
    pub fn new(r: &RhoVector) -> Self {
        let c3 = if r.rho2 == 1.0 {
            1.0
        } else {
            r.p + (1.0 - r.p) * r.rho2
        };
        ClassSampler {
            c1: r.p * r.rho1,
            c2: r.p,
            c3,
        }
    }

    #[inline]
    fn uniform(rng: &mut impl RngCore) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Samples membership for indices `lo..hi` into the two word vectors
    /// (which must already be sized and hold no bits in that range).
    #[inline]
    pub fn fill(&self, rng: &mut impl RngCore, lo: usize, hi: usize, a: &mut [u64], b: &mut [u64]) {
        for e in lo..hi {
            let u = Self::uniform(rng);
            let (w, bit) = (e / 64, 1u64 << (e % 64));
            if u < self.c2 {
                a[w] |= bit;
                if u < self.c1 {
                    b[w] |= bit;
                }
            } else if u < self.c3 {
                b[w] |= bit;
            }
        }
    }
}

/// Draws one correlated pair over `{0..n}`.
pub fn sample_pair(n: usize, r: &RhoVector, rng: &mut impl RngCore) -> (IntSet, IntSet) {
    let universe = n + 1;
    let words = universe.div_ceil(64);
    let (mut a, mut b) = (vec![0u64; words], vec![0u64; words]);
    ClassSampler::new(r).fill(rng, 0, universe, &mut a, &mut b);
    (IntSet::from_words(universe, a), IntSet::from_words(universe, b))
}

/// The pair drawn by trial `trial` of a run seeded with `seed`.
pub fn sample_trial_pair(n: usize, r: &RhoVector, seed: u64, trial: u64) -> (IntSet, IntSet) {
    sample_pair(n, r, &mut trial_rng(seed, trial))
}

/// A Monte-Carlo frequency with its Wilson-score interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub trials: u64,
    pub successes: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub n: usize,
    pub rho: RhoVector,
}

impl EstimateWithCI {
    pub fn from_counts(successes: u64, trials: u64, seed: u64, n: usize, rho: RhoVector) -> Self {
        let point = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        EstimateWithCI {
            point,
            trials,
            successes,
            ci_low: ci_low.min(point),
            ci_high: ci_high.max(point),
            seed,
            n,
            rho,
        }
    }

    /// Binomial standard error of the point estimate.
    pub fn std_error(&self) -> f64 {
        (self.point * (1.0 - self.point) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let ph = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (ph + z2 / (2.0 * n)) / denom;
    let half = z / denom * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::usage("trials must be at least 1"));
    }
    Ok(())
}

/// Runs `trials` pair draws and feeds each pair's words and statistics to
/// `visit`, returning per-chunk accumulators in chunk order.
pub(crate) fn run_pair_trials<T, F>(
    n: usize,
    r: &RhoVector,
    trials: u64,
    seed: u64,
    par: &Parallelism,
    visit: F,
) -> Vec<T>
where
    T: Default + Send,
    F: Fn(&mut T, &[u64], &[u64], &SumDiffStats) + Sync + Send,
{
    let universe = n + 1;
    let words = universe.div_ceil(64);
    let sampler = ClassSampler::new(r);
    par.map_chunks(trials, |start, end| {
        let mut acc = T::default();
        let mut kernel = SumDiffKernel::new();
        let (mut a, mut b) = (vec![0u64; words], vec![0u64; words]);
        for t in start..end {
            a.iter_mut().for_each(|w| *w = 0);
            b.iter_mut().for_each(|w| *w = 0);
            sampler.fill(&mut trial_rng(seed, t), 0, universe, &mut a, &mut b);
            let st = kernel.stats(&a, &b, universe);
            visit(&mut acc, &a, &b, &st);
        }
        acc
    })
}

/// Monte-Carlo estimate of `P_n(ρ⃗)`, the probability that a correlated
/// pair over `{0..n}` is MSTD.
pub fn estimate_p_n(n: usize, r: &RhoVector, trials: u64, seed: u64, par: &Parallelism) -> Result<EstimateWithCI> {
    check_trials(trials)?;
    let hits: u64 = run_pair_trials(n, r, trials, seed, par, |acc: &mut u64, _, _, st| {
        *acc += u64::from(st.is_mstd());
    })
    .into_iter()
    .sum();
    Ok(EstimateWithCI::from_counts(hits, trials, seed, n, *r))
}

/// Mean and (sample) standard deviation of an integer statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub std_dev: f64,
}

#[derive(Default, Clone, Copy)]
pub(crate) struct IntMoments {
    sum: u128,
    sum_sq: u128,
}

impl IntMoments {
    pub(crate) fn push(&mut self, x: u64) {
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    pub(crate) fn merge(&mut self, o: &IntMoments) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub(crate) fn finish(&self, count: u64) -> Moments {
        let n = count as f64;
        let mean = self.sum as f64 / n;
        let var = if count > 1 {
            // exact integer numerator: n·Σx² − (Σx)²
            let num = (count as u128) * self.sum_sq - self.sum * self.sum;
            num as f64 / (n * (n - 1.0))
        } else {
            0.0
        };
        Moments {
            mean,
            std_dev: var.max(0.0).sqrt(),
        }
    }
}

/// Summary of `𝒮`, `𝒟`, their complements and the `𝒟/𝒮` ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumDiffSummary {
    pub n: usize,
    pub rho: RhoVector,
    pub trials: u64,
    pub seed: u64,
    pub sum_size: Moments,
    pub diff_size: Moments,
    pub sum_complement: Moments,
    pub diff_complement: Moments,
    /// `mean 𝒟 / mean 𝒮`.
    pub ratio_of_means: f64,
    /// Average of per-trial `𝒟/𝒮` over trials with `𝒮 > 0`.
    pub mean_ratio: f64,
    /// Fraction of trials that were MSTD.
    pub mstd_frequency: f64,
}

#[derive(Default)]
pub(crate) struct StatsAcc {
    pub(crate) s: IntMoments,
    pub(crate) d: IntMoments,
    pub(crate) sc: IntMoments,
    pub(crate) dc: IntMoments,
    pub(crate) ratio_sum: f64,
    pub(crate) ratio_count: u64,
    pub(crate) mstd: u64,
}

impl StatsAcc {
    pub(crate) fn push(&mut self, st: &SumDiffStats) {
        self.s.push(st.sum_size as u64);
        self.d.push(st.diff_size as u64);
        self.sc.push(st.sum_complement as u64);
        self.dc.push(st.diff_complement as u64);
        if st.sum_size > 0 {
            self.ratio_sum += st.diff_size as f64 / st.sum_size as f64;
            self.ratio_count += 1;
        }
        self.mstd += u64::from(st.is_mstd());
    }

    pub(crate) fn merge(&mut self, o: &StatsAcc) {
        self.s.merge(&o.s);
        self.d.merge(&o.d);
        self.sc.merge(&o.sc);
        self.dc.merge(&o.dc);
        self.ratio_sum += o.ratio_sum;
        self.ratio_count += o.ratio_count;
        self.mstd += o.mstd;
    }

    pub(crate) fn fold(parts: Vec<StatsAcc>) -> StatsAcc {
        let mut total = StatsAcc::default();
        for p in &parts {
            total.merge(p);
        }
        total
    }

    pub(crate) fn summary(&self, n: usize, rho: RhoVector, trials: u64, seed: u64) -> SumDiffSummary {
        let s = self.s.finish(trials);
        let d = self.d.finish(trials);
        SumDiffSummary {
            n,
            rho,
            trials,
            seed,
            sum_size: s,
            diff_size: d,
            sum_complement: self.sc.finish(trials),
            diff_complement: self.dc.finish(trials),
            ratio_of_means: if s.mean > 0.0 { d.mean / s.mean } else { f64::NAN },
            mean_ratio: if self.ratio_count > 0 {
                self.ratio_sum / self.ratio_count as f64
            } else {
                f64::NAN
            },
            mstd_frequency: self.mstd as f64 / trials as f64,
        }
    }
}

/// Sample moments of `𝒮, 𝒟, 𝒮ᶜ, 𝒟ᶜ` over `trials` correlated pairs.
pub fn estimate_sum_diff_stats(
    n: usize,
    r: &RhoVector,
    trials: u64,
    seed: u64,
    par: &Parallelism,
) -> Result<SumDiffSummary> {
    check_trials(trials)?;
    let parts = run_pair_trials(n, r, trials, seed, par, |acc: &mut StatsAcc, _, _, st| acc.push(st));
    Ok(StatsAcc::fold(parts).summary(n, *r, trials, seed))
}
