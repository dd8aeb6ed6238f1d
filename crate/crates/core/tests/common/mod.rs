//! Brute-force oracles shared by the integration tests. None of these call the
//! closed forms they are compared against.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tro::distributions::{sample, GroundTruth, SampleSet};
use tro::lp::{self, LinearProgram};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn nv_samples(n: usize, seed: u64) -> SampleSet {
    sample(&GroundTruth::newsvendor_default(), n, seed).unwrap()
}

pub fn pf_samples(n: usize, seed: u64) -> SampleSet {
    sample(&GroundTruth::portfolio_default(), n, seed).unwrap()
}

pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut best = g(a).max(g(b));
    for _ in 0..iters {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        let (gc, gd) = (g(c), g(d));
        best = best.max(gc).max(gd);
        if gc >= gd {
            b = d;
        } else {
            a = c;
        }
    }
    best
}

/// sup E g(R) over two-point laws with mean `m` and variance `v`: upper atom
/// b = m + σe^u scanned densely in u, then refined locally.
pub fn two_point_sup(g: impl Fn(f64) -> f64, m: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return g(m);
    }
    let sd = v.sqrt();
    let value = |u: f64| {
        let up = sd * u.exp();
        let down = v / up;
        // mass on the upper atom
        let q = down / (up + down);
        q * g(m + up) + (1.0 - q) * g(m - down)
    };
    let (lo, hi, k) = (-14.0, 14.0, 28_000);
    let step = (hi - lo) / k as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=k {
        let u = lo + step * i as f64;
        let val = value(u);
        if val > best.0 {
            best = (val, u);
        }
    }
    best.0.max(golden_max(value, best.1 - step, best.1 + step, 80))
}

/// sup of Σ wᵢ E f over the W₁ ball (ℓ1 ground cost) as a transport LP:
/// each atom's mass is split over explicit destinations, and budget may also
/// be spent on recession rays ±e_k whose per-unit gain is the asymptotic
/// slope of f, estimated by a far finite difference.
pub fn w1_lp_sup(atoms: &[Vec<f64>], weights: &[f64], radius: f64, f: impl Fn(&[f64]) -> f64, steps: &[f64]) -> f64 {
    let dim = atoms[0].len();
    let mut dests: Vec<(usize, Vec<f64>, f64)> = Vec::new(); // (atom, point, cost)
    for (i, a) in atoms.iter().enumerate() {
        for b in atoms {
            dests.push((i, b.clone(), l1(a, b)));
        }
        for k in 0..dim {
            for &s in steps {
                for sign in [-1.0, 1.0] {
                    let mut d = a.clone();
                    d[k] += sign * s;
                    dests.push((i, d, s));
                }
            }
        }
    }
    let mut rays = Vec::new();
    for a in atoms {
        for k in 0..dim {
            for sign in [-1.0, 1.0] {
                let at = |dist: f64| {
                    let mut d = a.clone();
                    d[k] += sign * dist;
                    f(&d)
                };
                let far = 1e6 * (1.0 + steps.iter().cloned().fold(0.0, f64::max));
                rays.push(((at(2.0 * far) - at(far)) / far).max(0.0));
            }
        }
    }
    let nv = dests.len() + rays.len();
    let mut c = vec![0.0; nv];
    let mut a_eq = vec![vec![0.0; nv]; atoms.len()];
    let mut budget = vec![0.0; nv];
    for (j, (i, d, cost)) in dests.iter().enumerate() {
        c[j] = -f(d);
        a_eq[*i][j] = 1.0;
        budget[j] = *cost;
    }
    for (j, slope) in rays.iter().enumerate() {
        c[dests.len() + j] = -slope;
        budget[dests.len() + j] = 1.0;
    }
    let prog = LinearProgram { c, a_eq, b_eq: weights.to_vec(), a_ub: vec![budget], b_ub: vec![radius] };
    -lp::solve(&prog).unwrap().objective
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// max Σ pᵢsᵢ over {p ∈ Δ : −(1/N)Σ ln(N pᵢ) ≤ ε} in the primal: a
/// log-barrier path t → 0, each stage maximized by equality-constrained
/// Newton steps on the simplex with a feasibility-keeping line search; best
/// of `restarts` random strictly feasible starts.
pub fn burg_primal(s: &[f64], eps: f64, restarts: usize, seed: u64) -> f64 {
    let n = s.len();
    let nf = n as f64;
    let div = |p: &[f64]| -p.iter().map(|&v| (nf * v).ln()).sum::<f64>() / nf;
    let lin = |p: &[f64]| p.iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
    let scale = s.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
    let mut r = rng(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..restarts {
        // a random point pulled toward uniform until strictly feasible
        let q = random_simplex(&mut r, n);
        let mut lam = 1.0;
        let mut p: Vec<f64> = q.clone();
        while !(div(&p) < eps) {
            lam *= 0.5;
            p = q.iter().map(|v| lam * v + (1.0 - lam) / nf).collect();
        }
        let mut t = scale;
        while t > 1e-12 * scale {
            let obj = |p: &[f64]| {
                let slack = eps - div(p);
                if p.iter().any(|&v| v <= 0.0) || !(slack > 0.0) {
                    f64::NEG_INFINITY
                } else {
                    lin(p) + t * slack.ln()
                }
            };
            for _ in 0..100 {
                let sig = eps - div(&p);
                let a: Vec<f64> = p.iter().map(|&v| 1.0 / (nf * v)).collect();
                let g: Vec<f64> = (0..n).map(|i| s[i] + t * a[i] / sig).collect();
                // KKT system [H 1; 1ᵀ 0] with H = −t(diag(aᵢ/(pᵢσ)) + aaᵀ/σ²)
                let mut k = vec![vec![0.0; n + 1]; n + 1];
                for i in 0..n {
                    for j in 0..n {
                        k[i][j] = -t * a[i] * a[j] / (sig * sig);
                    }
                    k[i][i] -= t * a[i] / (p[i] * sig);
                    k[i][n] = 1.0;
                    k[n][i] = 1.0;
                }
                let mut rhs: Vec<f64> = g.iter().map(|v| -v).collect();
                rhs.push(0.0);
                let Some(sol) = tro::linalg::solve(&k, &rhs) else { break };
                let d = &sol[..n];
                let decrement: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
                if !(decrement.abs() > 1e-15 * scale) {
                    break;
                }
                // H is negative definite on Σd = 0, so d ascends
                let f0 = obj(&p);
                let mut step = 1.0;
                let mut moved = false;
                while step > 1e-20 {
                    let cand: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + step * b).collect();
                    if obj(&cand) > f0 {
                        p = cand;
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            best = best.max(lin(&p));
            t *= 0.2;
        }
    }
    best
}

/// max Σ pᵢsᵢ over {p ∈ Δ : ‖p − 𝟙/N‖₁ ≤ ε} by enumerating every vertex of the
/// polytope: N−1 active constraints among {pᵢ = 0} and the facets
/// Σ σᵢ(pᵢ − 1/N) = ε, together with Σ pᵢ = 1.
pub fn tv_vertex_max(s: &[f64], eps: f64) -> f64 {
    let n = s.len();
    let nf = n as f64;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        rows.push((a, 0.0));
    }
    for mask in 0..(1u32 << n) {
        let sig: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let rhs = eps + sig.iter().sum::<f64>() / nf;
        rows.push((sig, rhs));
    }
    let feasible = |p: &[f64]| {
        p.iter().all(|&v| v >= -1e-12) && p.iter().map(|v| (v - 1.0 / nf).abs()).sum::<f64>() <= eps + 1e-12
    };
    let mut best = f64::NEG_INFINITY;
    let mut pick = vec![0usize; n - 1];
    fn next(pick: &mut [usize], m: usize) -> bool {
        let k = pick.len();
        for i in (0..k).rev() {
            if pick[i] < m - k + i {
                pick[i] += 1;
                for j in i + 1..k {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, v) in pick.iter_mut().enumerate() {
        *v = i;
    }
    loop {
        let mut a = vec![vec![1.0; n]];
        let mut b = vec![1.0];
        for &r in &pick {
            a.push(rows[r].0.clone());
            b.push(rows[r].1);
        }
        if let Some(p) = tro::linalg::solve(&a, &b) {
            if p.iter().all(|v| v.is_finite()) && feasible(&p) {
                best = best.max(p.iter().zip(s).map(|(x, y)| x * y).sum());
            }
        }
        if n < 2 || !next(&mut pick, rows.len()) {
            break;
        }
    }
    best
}

/// max over a dense grid of `points` values in [lo, hi] (both ends included).
pub fn dense_max(g: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    (0..points)
        .map(|i| g(lo + (hi - lo) * i as f64 / (points - 1) as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

use tro::ambiguity::{build_table1, build_table2, SetKind, ShapeParameter, Table1Params, Table2Params};
use tro::objective::{shortfall, PortfolioParams};
use tro::reformulations::{nv_inner_sup, pf_inner_sup};

/// Largest relative error of one evaluator against its oracle over `count`
/// random (decision, sample set) instances.
#[derive(Debug, Clone)]
pub struct EvaluatorError {
    pub name: &'static str,
    pub max_rel_err: f64,
    pub instances: usize,
}

pub const EVALUATORS: [&str; 7] = [
    "newsvendor/mean-variance",
    "newsvendor/wasserstein",
    "newsvendor/burg",
    "newsvendor/confidence-interval",
    "portfolio/mean-variance",
    "portfolio/wasserstein",
    "portfolio/total-variation",
];

pub fn evaluator_vs_oracle(name: &str, count: usize, seed: u64) -> EvaluatorError {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for k in 0..count {
        let (ours, oracle) = instance(name, &mut r, seed.wrapping_mul(1000) + k as u64);
        let e = rel_err(ours, oracle);
        assert!(e.is_finite(), "{name} instance {k}: {ours} vs {oracle}");
        worst = worst.max(e);
    }
    let name = EVALUATORS.iter().find(|&&e| e == name).expect("known evaluator");
    EvaluatorError { name, max_rel_err: worst, instances: count }
}

fn instance(name: &str, r: &mut ChaCha8Rng, seed: u64) -> (f64, f64) {
    let scale = 0.25 + 1.75 * r.random::<f64>();
    if let Some(kind) = name.strip_prefix("newsvendor/") {
        let n = r.random_range(2..=10);
        let s = nv_samples(n, seed);
        let xi = s.scalars();
        let max = xi.iter().cloned().fold(0.0, f64::max);
        let x = 2.0 * max * r.random::<f64>();
        let params = Table1Params {
            wasserstein_r: 100.0 * scale,
            burg_r: 10.0 * scale,
            ..Table1Params::default()
        };
        let which: SetKind = kind.parse().unwrap();
        let sp = build_table1(&s, which, &params).unwrap();
        let ours = nv_inner_sup(&sp, x, &s).unwrap().value;
        let g = |v: f64| shortfall(x, v);
        let oracle = match &sp {
            ShapeParameter::MeanVariance { mean, cov } => two_point_sup(g, mean[0], cov[0][0]),
            ShapeParameter::Wasserstein1 { center, radius } => w1_lp_sup(
                center.support(),
                center.weights(),
                *radius,
                |d| g(d[0]),
                &[1.0, 10.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            ),
            ShapeParameter::BurgDivergence { radius, .. } => {
                let sv: Vec<f64> = xi.iter().map(|&v| g(v)).collect();
                burg_primal(&sv, *radius, 10, seed)
            }
            ShapeParameter::ConfidenceInterval { mean, halfwidth } => {
                dense_max(g, mean - halfwidth, mean + halfwidth, 1000)
            }
            other => panic!("unexpected set {other:?}"),
        };
        (ours, oracle)
    } else {
        let kind = name.strip_prefix("portfolio/").unwrap();
        // the vertex enumeration grows as C(N + 2^N, N − 1)
        let n = if kind == "total-variation" { r.random_range(2..=5) } else { r.random_range(2..=10) };
        let s = pf_samples(n, seed);
        let params = PortfolioParams::for_samples(&s);
        let x = random_simplex(r, params.n);
        let t = r.random_range(-0.5..0.5);
        let tp = Table2Params { wasserstein_r: 0.1 * scale, tv_r: 100.0 * scale };
        let sp = build_table2(&s, kind.parse().unwrap(), &tp).unwrap();
        let ours = pf_inner_sup(&sp, &x, t, &params, &s).unwrap().value;
        let oracle = match &sp {
            ShapeParameter::MeanVariance { mean, cov } => {
                let m = -tro::linalg::dot(&x, mean);
                let v = tro::linalg::quad_form(cov, &x);
                two_point_sup(|ret| params.loss_from_return(t, ret), m, v)
            }
            ShapeParameter::Wasserstein1 { center, radius } => w1_lp_sup(
                center.support(),
                center.weights(),
                *radius,
                |d| params.loss(&x, t, d),
                &[0.01, 0.05, 0.1, 0.5, 1.0],
            ),
            ShapeParameter::TotalVariation { center, radius } => {
                let sv: Vec<f64> = center.support().iter().map(|d| params.loss(&x, t, d)).collect();
                tv_vertex_max(&sv, *radius)
            }
            other => panic!("unexpected set {other:?}"),
        };
        (ours, oracle)
    }
}
