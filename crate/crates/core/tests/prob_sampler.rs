mod common;

use common::rv;
use mstd_core::enumerate::{build_polynomial, enumerate_mstd_pairs};
use mstd_core::prob::{
    p_hat, pair_probability, prob_diff_missing_bound, prob_joint_event_e, prob_sum_missing, rho3, rho4,
};
use mstd_core::sampler::{estimate_p_n, estimate_sum_diff_stats, sample_trial_pair, Parallelism};
use mstd_core::sets::{signed_difference_set, sumset};
use mstd_core::IntSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn one_set_reduction() {
    for p in [0.1, 0.37, 0.5, 0.9] {
        let r = rv(p, 1.0, 0.0);
        assert!((rho3(&r) - (1.0 - p * p)).abs() < 1e-15);
        assert!((rho4(&r) - (1.0 - p)).abs() < 1e-15);
        assert!((p_hat(&r) - p * p).abs() < 1e-15);
        assert!((prob_sum_missing(7, 20, &r).unwrap() - (1.0 - p * p).powi(4)).abs() < 1e-15);
        assert!((prob_sum_missing(8, 20, &r).unwrap() - (1.0 - p) * (1.0 - p * p).powi(4)).abs() < 1e-15);
    }
    let r = rv(0.3, 0.0, 1.0);
    assert!((p_hat(&r) - 0.42).abs() < 1e-15);
}

#[test]
fn identity_on_grid() {
    for i in 0..=20 {
        for j in 0..=20 {
            for k in 0..=20 {
                let r = rv(i as f64 / 20.0, j as f64 / 20.0, k as f64 / 20.0);
                assert!((1.0 - rho3(&r) - p_hat(&r)).abs() < 1e-12);
                assert_eq!((1.0 - rho3(&r)).abs() < 1e-12, p_hat(&r) < 1e-12);
                assert_eq!(rho3(&r) < 1e-12, (1.0 - p_hat(&r)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn joint_event_leading_order() {
    for r2 in [0.3, 0.7, 1.0] {
        let r = rv(1e-6, 0.4, r2);
        let ratio = p_hat(&r).powi(2) / (r.p * prob_joint_event_e(&r));
        assert!((ratio - 4.0).abs() < 1e-4, "{ratio}");
    }
}

#[test]
fn sum_missing_at_middle_matches_sampling() {
    let r = rv(0.5, 0.5, 0.5);
    let (n, trials) = (50, 100_000u64);
    let analytic = prob_sum_missing(50, n, &r).unwrap();
    assert!((analytic - rho4(&r) * rho3(&r).powi(25)).abs() < 1e-18);
    let hits = (0..trials)
        .filter(|&t| {
            let (a, b) = sample_trial_pair(n, &r, 5, t);
            !sumset(&a, &b).unwrap().contains(50)
        })
        .count() as f64;
    let se = (analytic * (1.0 - analytic) / trials as f64).sqrt();
    assert!(hits / (trials as f64) <= analytic + 4.0 * se + 5.0 / trials as f64);
}

#[test]
fn diff_bound_dominates_sampling() {
    let (n, trials) = (60, 20_000u64);
    for r in [rv(0.5, 0.5, 0.5), rv(0.3, 0.6, 0.2)] {
        for k in [15i64, 40, 45, 59] {
            let bound = prob_diff_missing_bound(k, n, &r).unwrap();
            let hits = (0..trials)
                .filter(|&t| {
                    let (a, b) = sample_trial_pair(n, &r, 9, t);
                    !signed_difference_set(&a, &b).unwrap().contains(k)
                })
                .count() as f64;
            let freq = hits / trials as f64;
            let se = (bound * (1.0 - bound) / trials as f64).sqrt();
            assert!(freq <= bound + 4.0 * se + 1e-12, "k={k}: {freq} > {bound}");
        }
    }
    assert!(prob_diff_missing_bound(0, n, &rv(0.5, 0.5, 0.5)).is_err());
}

#[test]
fn pair_probabilities_sum_to_one() {
    let r = rv(0.3, 0.6, 0.2);
    for n in 0..=3usize {
        let u = n + 1;
        let mut total = 0.0;
        for am in 0u64..1 << u {
            for bm in 0u64..1 << u {
                let a = IntSet::from_words(u, vec![am]);
                let b = IntSet::from_words(u, vec![bm]);
                total += pair_probability(&a, &b, &r).unwrap();
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }
    let e = IntSet::new(9);
    assert!((pair_probability(&e, &e, &rv(0.5, 0.5, 0.5)).unwrap() - 0.25f64.powi(9)).abs() < 1e-20);
}

#[test]
fn monte_carlo_agrees_with_exact_polynomial() {
    let poly = build_polynomial(&enumerate_mstd_pairs(8, 10, &Parallelism::default()).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut inside = 0;
    for i in 0..10 {
        let r = rv(rng.gen_range(0.05..0.95), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let est = estimate_p_n(8, &r, 200_000, i, &Parallelism::default()).unwrap();
        let exact = poly.evaluate(&r);
        let wide = 4.0 * (exact * (1.0 - exact) / est.trials as f64).sqrt();
        assert!((est.point - exact).abs() <= wide, "{r:?}: {} vs {exact}", est.point);
        inside += usize::from(est.ci_low <= exact && exact <= est.ci_high);
    }
    assert!(inside >= 8, "only {inside}/10 intervals cover the exact value");
}

#[test]
fn one_set_estimates_are_stable_in_n() {
    let r = rv(0.5, 1.0, 0.0);
    let ests: Vec<f64> = [20, 40, 80, 160]
        .iter()
        .map(|&n| estimate_p_n(n, &r, 400_000, 3, &Parallelism::default()).unwrap().point)
        .collect();
    let (lo, hi) = ests.iter().fold((f64::MAX, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(lo > 0.0 && hi <= 3.0 * lo, "{ests:?}");
}

#[test]
fn full_first_set_never_wins() {
    for r2 in [0.0, 0.3, 1.0] {
        let s = estimate_sum_diff_stats(40, &rv(1.0, 0.5, r2), 2000, 4, &Parallelism::default()).unwrap();
        assert_eq!(s.mstd_frequency, 0.0);
    }
    let s = estimate_sum_diff_stats(0, &rv(0.5, 0.5, 0.5), 500, 1, &Parallelism::default()).unwrap();
    assert!(s.sum_size.mean <= 1.0 && s.diff_size.mean <= 1.0);
}

#[test]
fn reports_do_not_depend_on_threads() {
    let r = rv(0.5, 0.0, 1.0);
    let one = estimate_p_n(60, &r, 30_000, 8, &Parallelism::serial()).unwrap();
    let four = estimate_p_n(60, &r, 30_000, 8, &Parallelism::with_threads(4)).unwrap();
    assert_eq!(one, four);
    let one = estimate_sum_diff_stats(60, &r, 9000, 8, &Parallelism::serial()).unwrap();
    let three = estimate_sum_diff_stats(60, &r, 9000, 8, &Parallelism::with_threads(3)).unwrap();
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&three).unwrap());
}
