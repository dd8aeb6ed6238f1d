mod common;

use common::*;
use proptest::prelude::*;
use tro::ambiguity::{contains, tro_contains, ShapeParameter, TroAmbiguity, DEFAULT_TOL};
use tro::distributions::{moments, sample, DiscreteDistribution, GroundTruth};
use tro::objective::{shortfall, NewsvendorParams, PortfolioParams};
use tro::reformulations::{nv_inner_sup, nv_saa, nv_tro_objective, pf_inner_sup, pf_saa, pf_tro_objective};
use tro::set_analysis::{hausdorff, pseudometric, DecisionGrid, DistributionPanel};

fn weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.iter().map(|w| w / s).collect()
    })
}

fn scalar_law(max_atoms: usize) -> impl Strategy<Value = DiscreteDistribution> {
    (1..=max_atoms).prop_flat_map(|k| {
        (prop::collection::vec(-50.0f64..150.0, k), weights(k))
            .prop_map(|(xs, w)| DiscreteDistribution::from_scalars(&xs, w).unwrap())
    })
}

fn nv_shape(kind: u8, s: &tro::distributions::SampleSet, radius: f64) -> ShapeParameter {
    let center = s.empirical();
    match kind % 4 {
        0 => {
            let m = s.moments(false);
            ShapeParameter::MeanVariance { mean: m.mean, cov: m.cov }
        }
        1 => ShapeParameter::Wasserstein1 { center, radius: 100.0 * radius },
        2 => ShapeParameter::BurgDivergence { center, radius },
        _ => ShapeParameter::TotalVariation { center, radius: radius.min(2.0) },
    }
}

fn pf_shape(kind: u8, s: &tro::distributions::SampleSet, radius: f64) -> ShapeParameter {
    let center = s.empirical();
    match kind % 4 {
        0 => {
            let m = s.moments(false);
            ShapeParameter::MeanVariance { mean: m.mean, cov: m.cov }
        }
        1 => ShapeParameter::Wasserstein1 { center, radius: 0.1 * radius },
        2 => ShapeParameter::BurgDivergence { center, radius },
        _ => ShapeParameter::TotalVariation { center, radius: radius.min(2.0) },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expectation_of_one_is_one(d in scalar_law(12)) {
        prop_assert!((d.expectation(|_| 1.0) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_a_pure_function(n in 1usize..50, seed in any::<u64>()) {
        let gt = GroundTruth::portfolio_default();
        prop_assert_eq!(sample(&gt, n, seed).unwrap(), sample(&gt, n, seed).unwrap());
    }

    #[test]
    fn mixture_expectation_and_moments_are_linear(a in scalar_law(6), b in scalar_law(6), theta in 0.0f64..=1.0) {
        let m = a.mixture(theta, &b).unwrap();
        let f = |x: &[f64]| (x[0] / 40.0).sin() + x[0] * 0.01;
        let lhs = m.expectation(f);
        let rhs = (1.0 - theta) * a.expectation(f) + theta * b.expectation(f);
        prop_assert!((lhs - rhs).abs() <= 1e-10);
        let (ma, mb, mm) = (moments(&a, false), moments(&b, false), moments(&m, false));
        let mean = (1.0 - theta) * ma.mean[0] + theta * mb.mean[0];
        let second = (1.0 - theta) * (ma.cov[0][0] + ma.mean[0].powi(2)) + theta * (mb.cov[0][0] + mb.mean[0].powi(2));
        prop_assert!((mm.mean[0] - mean).abs() <= 1e-10 * mean.abs().max(1.0));
        prop_assert!((mm.cov[0][0] - (second - mean * mean)).abs() <= 1e-10 * second.max(1.0));
    }

    #[test]
    fn membership_grows_with_radius(seed in 0u64..1000, r1 in 0.0f64..1.0, dr in 0.0f64..1.0, k in 0usize..8) {
        let s = nv_samples(6, seed);
        for kind in 1..4u8 {
            let small = nv_shape(kind, &s, r1);
            let big = small.with_radius(small.radius().unwrap() + dr).unwrap();
            let q = &DistributionPanel::generate(&small, k + 1, seed).unwrap().members[k];
            if contains(&small, q, DEFAULT_TOL).unwrap() {
                prop_assert!(contains(&big, q, DEFAULT_TOL).unwrap());
            }
        }
    }

    #[test]
    fn nv_inner_sup_dominates_and_grows(seed in 0u64..1000, x in 0.0f64..300.0, r1 in 0.0f64..1.5, dr in 0.0f64..1.5) {
        let s = nv_samples(7, seed);
        let saa = nv_saa(x, &s);
        for kind in 0..4u8 {
            let sp = nv_shape(kind, &s, r1);
            let v = nv_inner_sup(&sp, x, &s).unwrap().value;
            prop_assert!(v >= saa - 1e-9 * saa.abs().max(1.0), "{kind}: {v} < {saa}");
            if kind > 0 {
                let big = sp.with_radius(sp.radius().unwrap() + dr).unwrap();
                let w = nv_inner_sup(&big, x, &s).unwrap().value;
                prop_assert!(w >= v - 1e-9 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn nv_inner_sup_is_convex_in_x(seed in 0u64..1000, x1 in 0.0f64..300.0, x2 in 0.0f64..300.0, r in 0.05f64..1.5) {
        let s = nv_samples(6, seed);
        for kind in 0..4u8 {
            let sp = nv_shape(kind, &s, r);
            let f = |x: f64| nv_inner_sup(&sp, x, &s).unwrap().value;
            let (a, b, m) = (f(x1), f(x2), f(0.5 * (x1 + x2)));
            prop_assert!(m <= 0.5 * (a + b) + 1e-8 * a.abs().max(b.abs()).max(1.0), "{kind}");
        }
    }

    #[test]
    fn pf_inner_sup_is_convex_and_dominates(seed in 0u64..1000, u in prop::collection::vec(0.01f64..1.0, 8),
                                            t1 in -0.5f64..0.5, t2 in -0.5f64..0.5, r in 0.05f64..1.5) {
        let s = pf_samples(8, seed);
        let p = PortfolioParams::for_samples(&s);
        let norm = |v: &[f64]| { let t: f64 = v.iter().sum(); v.iter().map(|a| a / t).collect::<Vec<_>>() };
        let (x1, x2) = (norm(&u[..4]), norm(&u[4..]));
        let xm: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 0.5 * (a + b)).collect();
        for kind in 0..4u8 {
            let sp = pf_shape(kind, &s, r);
            let f = |x: &[f64], t: f64| pf_inner_sup(&sp, x, t, &p, &s).unwrap().value;
            let (a, b, m) = (f(&x1, t1), f(&x2, t2), f(&xm, 0.5 * (t1 + t2)));
            prop_assert!(m <= 0.5 * (a + b) + 1e-8 * a.abs().max(b.abs()).max(1.0), "{kind}");
            let saa = pf_saa(&p, &x1, t1, &s);
            prop_assert!(a >= saa - 1e-9 * saa.abs().max(1.0));
        }
    }

    #[test]
    fn tro_objective_is_affine_in_theta(seed in 0u64..1000, x in 0.0f64..300.0, theta in 0.0f64..=1.0) {
        let s = nv_samples(5, seed);
        let params = NewsvendorParams::default();
        for kind in 0..4u8 {
            let sp = nv_shape(kind, &s, 0.7);
            let v = |th: f64| nv_tro_objective(&params, &sp, th, x, &s).unwrap();
            let lin = (1.0 - theta) * v(0.0) + theta * v(1.0);
            prop_assert!((v(theta) - lin).abs() <= 1e-10 * lin.abs().max(1.0));
        }
        let ps = pf_samples(5, seed);
        let pp = PortfolioParams::for_samples(&ps);
        let sp = pf_shape(1, &ps, 0.5);
        let x4 = [0.25; 4];
        let v = |th: f64| pf_tro_objective(&pp, &sp, th, &x4, 0.1, &ps).unwrap();
        prop_assert!((v(theta) - ((1.0 - theta) * v(0.0) + theta * v(1.0))).abs() <= 1e-10);
    }

    #[test]
    fn star_center_and_hierarchy(seed in 0u64..500, k in 0usize..6, alpha in 0.0f64..=1.0, th1 in 0.0f64..=1.0, th2 in 0.0f64..=1.0) {
        let s = nv_samples(6, seed);
        let center = s.empirical();
        let (lo, hi) = (th1.min(th2), th1.max(th2));
        for kind in 1..4u8 {
            let sp = nv_shape(kind, &s, 0.8);
            let q = &DistributionPanel::generate(&sp, k + 1, seed).unwrap().members[k];
            prop_assert!(contains(&sp, q, DEFAULT_TOL).unwrap());
            prop_assert!(contains(&sp, &center.blend(alpha, q).unwrap(), DEFAULT_TOL).unwrap(), "{kind}");
            let m = center.blend(alpha, q).unwrap();
            let at = |th: f64| tro_contains(&TroAmbiguity::new(sp.clone(), th, center.clone()).unwrap(), &m, DEFAULT_TOL).unwrap();
            if at(lo) {
                prop_assert!(at(hi), "{kind}: member at {lo} but not at {hi}");
            }
        }
    }

    #[test]
    fn pseudometric_axioms(a in scalar_law(5), b in scalar_law(5), c in scalar_law(5)) {
        let samples = tro::distributions::SampleSet::from_scalars(&[10.0, 120.0]).unwrap();
        let grid = DecisionGrid::newsvendor(&samples, 41).unwrap();
        let f = NewsvendorParams::default();
        let d = |p: &DiscreteDistribution, q: &DiscreteDistribution| pseudometric(p, q, &grid, &f).value;
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }
}

#[test]
fn pseudometric_two_diracs_matches_enumeration() {
    let f = NewsvendorParams::default();
    let grid = DecisionGrid::new(vec![vec![0.0], vec![0.5], vec![1.0]], "3 points").unwrap();
    let (d0, d1) = (DiscreteDistribution::point_mass(vec![0.0]), DiscreteDistribution::point_mass(vec![1.0]));
    let brute = [0.0, 0.5, 1.0].iter().map(|&x| (f.cost(x, 0.0) - f.cost(x, 1.0)).abs()).fold(0.0, f64::max);
    assert_eq!(pseudometric(&d0, &d1, &grid, &f).value, brute);
}

#[test]
fn hausdorff_of_equal_panels_is_zero() {
    let s = nv_samples(10, 3);
    let sp = nv_shape(2, &s, 0.5);
    let p = DistributionPanel::generate(&sp, 6, 9).unwrap();
    let mut rev = p.members.clone();
    rev.reverse();
    let q = DistributionPanel::from_members(rev, "reversed").unwrap();
    let grid = DecisionGrid::newsvendor_default(&s).unwrap();
    assert_eq!(hausdorff(&p, &q, &grid, &NewsvendorParams::default()), 0.0);
}

#[test]
fn pseudometric_small_newsvendor_matches_double_loop() {
    let s = tro::distributions::SampleSet::from_scalars(&[10.0, 50.0, 90.0]).unwrap();
    let p = s.empirical();
    let q = p.reweighted(vec![0.6, 0.3, 0.1]).unwrap();
    let f = NewsvendorParams::default();
    let grid = DecisionGrid::new((0..200).map(|i| vec![i as f64]).collect(), "200 points").unwrap();
    let mut brute = 0.0f64;
    for x in 0..200 {
        let x = x as f64;
        let ep: f64 = [10.0, 50.0, 90.0].iter().map(|&v| f.cost(x, v) / 3.0).sum();
        let eq: f64 = [(10.0, 0.6), (50.0, 0.3), (90.0, 0.1)].iter().map(|&(v, w)| f.cost(x, v) * w).sum();
        brute = brute.max((ep - eq).abs());
    }
    assert!((pseudometric(&p, &q, &grid, &f).value - brute).abs() < 1e-9);
    assert!(shortfall(0.0, 5.0) == 0.0);
}
