mod common;

use common::{pinned_pair, rv, strict_pool, weak_disjoint_pool};
use mstd_core::fringe::{
    estimate_fringe_limit, fringe_partial_leq, fringe_profile, is_mstd_fringe, is_rich_pair, is_weak_mstd_fringe,
    lower_bound_p, minimal_fringe_order, profile_probability, BoundRoute, FringeTuple, LowerBoundConfig,
};
use mstd_core::prob::pair_probability;
use mstd_core::sampler::{estimate_p_n, sample_trial_pair, Parallelism};
use mstd_core::sets::is_mstd_pair;
use mstd_core::IntSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mo_tuple() -> FringeTuple {
    FringeTuple::from_literals("0,2,3,7,8,9,10", "0,2,3,7,8,9,10", "1,2,3,6,8,9,10,11", "1,2,3,6,8,9,10,11", 11)
        .unwrap()
}

#[test]
fn rich_strict_fringe_implies_mstd() {
    let pool = strict_pool();
    assert!(pool.len() > 100);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut certified = 0;
    for _ in 0..20_000 {
        let t = &pool[rng.gen_range(0..pool.len())];
        let n = rng.gen_range(4 * t.k + 4..=4 * t.k + 80);
        let r = rv(rng.gen_range(0.3..1.0), rng.gen_range(0.3..1.0), rng.gen_range(0.3..1.0));
        let (a, b) = pinned_pair(&mut rng, t, n, &r);
        assert_eq!(fringe_profile(&a, &b, n, t.k).unwrap(), *t);
        if is_rich_pair(&a, &b, n, t.k).unwrap() {
            certified += 1;
            assert!(is_mstd_pair(&a, &b).unwrap(), "{t:?} n={n} A={a} B={b}");
        }
    }
    assert!(certified > 5_000, "{certified}");
}

#[test]
fn rich_weak_fringe_with_disjoint_sets_implies_mstd() {
    let pool = weak_disjoint_pool();
    assert!(pool.len() > 20, "{}", pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut certified = 0;
    for _ in 0..20_000 {
        let t = &pool[rng.gen_range(0..pool.len())];
        let n = rng.gen_range(4 * t.k + 4..=4 * t.k + 80);
        let r = rv(rng.gen_range(0.35..0.65), 0.0, rng.gen_range(0.85..1.0));
        let (a, b) = pinned_pair(&mut rng, t, n, &r);
        assert!(a.intersection(&b).unwrap().is_empty());
        assert!(is_weak_mstd_fringe(&fringe_profile(&a, &b, n, t.k).unwrap()));
        if is_rich_pair(&a, &b, n, t.k).unwrap() {
            certified += 1;
            assert!(is_mstd_pair(&a, &b).unwrap(), "{t:?} n={n} A={a} B={b}");
        }
    }
    assert!(certified > 1_000, "{certified}");
}

#[test]
fn profile_probability_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 0..=2usize {
        let n = 2 * k + 2;
        let u = n + 1;
        for _ in 0..4 {
            let r = rv(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let m = 1u64 << (k + 1);
            let t = FringeTuple::from_masks(
                rng.gen_range(0..m),
                rng.gen_range(0..m),
                rng.gen_range(0..m),
                rng.gen_range(0..m),
                k,
            );
            let mut total = 0.0;
            for am in 0u64..1 << u {
                for bm in 0u64..1 << u {
                    let a = IntSet::from_words(u, vec![am]);
                    let b = IntSet::from_words(u, vec![bm]);
                    if fringe_profile(&a, &b, n, k).unwrap() == t {
                        total += pair_probability(&a, &b, &r).unwrap();
                    }
                }
            }
            assert!((profile_probability(&t, &r) - total).abs() < 1e-12);
        }
    }
}

#[test]
fn almost_all_mstd_pairs_are_rich() {
    let r = rv(0.5, 0.5, 0.5);
    let (mut mstd, mut poor) = (0u64, 0u64);
    for t in 0..1_500_000u64 {
        let (a, b) = sample_trial_pair(100, &r, 31, t);
        if is_mstd_pair(&a, &b).unwrap() {
            mstd += 1;
            poor += u64::from(!is_rich_pair(&a, &b, 100, 20).unwrap());
        }
    }
    assert!(mstd >= 300, "{mstd}");
    assert!((poor as f64) < 0.01 * mstd as f64, "{poor}/{mstd}");
}

#[test]
fn fringe_order_examples() {
    let t = mo_tuple();
    let n = 60;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (a, b) = pinned_pair(&mut rng, &t, n, &rv(1.0, 1.0, 0.0));
    assert!(is_rich_pair(&a, &b, n, 11).unwrap());
    let order = minimal_fringe_order(&a, &b, n, 11).unwrap();
    assert!(order.is_some_and(|k| k <= 11));
    let full = IntSet::full(21);
    assert_eq!(minimal_fringe_order(&full, &full, 20, 9).unwrap(), None);
    assert!(fringe_profile(&full, &full, 20, 10).is_err());
}

#[test]
fn partial_order_is_transitive_on_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut chains = 0;
    for _ in 0..20_000 {
        let k = rng.gen_range(2..10usize);
        let m = 1u64 << (k + 1);
        let dense = |rng: &mut ChaCha8Rng| rng.gen_range(0..m) | rng.gen_range(0..m) | 1;
        let big = FringeTuple::from_masks(dense(&mut rng), dense(&mut rng), dense(&mut rng), dense(&mut rng), k);
        let j = rng.gen_range(1..k);
        let i = rng.gen_range(0..j);
        let (mid, small) = (big.truncate(j), big.truncate(i));
        if fringe_partial_leq(&small, &mid) && fringe_partial_leq(&mid, &big) {
            chains += 1;
            assert!(fringe_partial_leq(&small, &big));
        }
        assert!(!fringe_partial_leq(&big, &big));
    }
    assert!(chains > 100, "{chains}");
}

#[test]
fn complement_profile_is_weak_with_equality() {
    let t = FringeTuple::from_literals("1,2,3,5,7,8", "0,4,6", "1,2,3,5,7,8", "0,4,6", 8).unwrap();
    let (lhs, rhs) = t.sides();
    assert_eq!(lhs, rhs);
    assert!(is_weak_mstd_fringe(&t) && !is_mstd_fringe(&t));
}

#[test]
fn limit_estimates() {
    let par = Parallelism::default();
    let t = mo_tuple();
    let e = estimate_fringe_limit(&t, &rv(0.5, 1.0, 0.0), None, 20_000, 1, &par).unwrap();
    assert!(e.product > 0.0);
    assert_eq!(e.product, e.profile_prob * e.richness_given_profile.point);

    let full = estimate_fringe_limit(&t, &rv(1.0, 1.0, 0.5), None, 100, 1, &par).unwrap();
    assert_eq!(full.richness_given_profile.point, 1.0);
    assert!(full.profile_prob == 0.0 || full.profile_prob == 1.0);

    let s = FringeTuple::from_literals("", "0", "0", "0,1,2", 2).unwrap();
    let r = rv(0.5, 0.5, 0.5);
    let x = estimate_fringe_limit(&s, &r, Some(200), 40_000, 2, &par).unwrap();
    let y = estimate_fringe_limit(&s, &r, Some(400), 40_000, 3, &par).unwrap();
    let (rx, ry) = (&x.richness_given_profile, &y.richness_given_profile);
    assert!(rx.ci_low <= ry.ci_high && ry.ci_low <= rx.ci_high);
    assert!(estimate_fringe_limit(&s, &r, Some(100), 10, 2, &par).is_err());
}

#[test]
fn lower_bounds() {
    let par = Parallelism::default();
    let cfg = LowerBoundConfig::default();
    for z in [rv(0.0, 0.5, 0.5), rv(1.0, 0.5, 0.5), rv(0.5, 0.0, 0.0), rv(0.5, 1.0, 1.0)] {
        let lb = lower_bound_p(&z, &cfg, &par).unwrap();
        assert_eq!((lb.route, lb.value), (BoundRoute::ZeroSet, 0.0));
    }
    let one = rv(0.5, 1.0, 0.0);
    let lb = lower_bound_p(&one, &cfg, &par).unwrap();
    assert_eq!(lb.route, BoundRoute::Strict);
    let mc = estimate_p_n(100, &one, 1_000_000, 4, &par).unwrap();
    assert!(lb.value > 0.0 && lb.value <= mc.ci_high, "{} vs {}", lb.value, mc.point);

    let comp = rv(0.5, 0.0, 1.0);
    let lb = lower_bound_p(&comp, &cfg, &par).unwrap();
    assert_eq!(lb.route, BoundRoute::WeakDisjoint);
    let mc = estimate_p_n(100, &comp, 200_000, 4, &par).unwrap();
    assert!(lb.value > 0.0 && lb.value <= mc.ci_high, "{} vs {}", lb.value, mc.point);
}
