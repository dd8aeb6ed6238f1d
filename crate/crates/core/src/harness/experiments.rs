//! The experiment runners. Every runner returns its records in canonical
//! (set, N, θ, rep) order whatever the thread schedule.

use rayon::prelude::*;

use super::config::{ExperimentConfig, KsDivisor, ProblemKind, SetSpec, ThetaRule};
use super::records::Record;
use super::truth::{configured, TrueValues};
use crate::ambiguity::{build_table1, build_table2, ShapeParameter, SetKind, Table1Params, Table2Params};
use crate::distributions::{sample, GroundTruth, SampleSet};
use crate::error::{Result, TroError};
use crate::objective::{shortfall, NewsvendorParams, PortfolioParams};
use crate::reformulations::{burg_dual_nested, burg_worst_case, tv_dual, tv_greedy};
use crate::rng::{derive_seed, splitmix64};
use crate::set_analysis::suites::{
    alpha_grid, two_point_check, contains_center, hierarchy_suite, star_center_suite, tv_hausdorff_trend,
};
use crate::set_analysis::{
    c_n, check_concavity, check_lipschitz, check_monotone, CheckReport, DecisionGrid, DistributionPanel,
};
use crate::solvers::{theta_grid, theta_sweep, Decision, SolveResult, TroProblem};
use crate::stats::{bootstrap_mean_ci, ks_normal, mean, median, std_dev, variance};

const PANEL_SALT: u64 = 0x7061_6e65_6c00_0000;
const BOOT_SALT: u64 = 0x626f_6f74_0000_0000;

/// Sample size of the star-center and hierarchy suites.
pub const SUITE_N: usize = 8;

pub fn ground_truth(problem: ProblemKind) -> GroundTruth {
    match problem {
        ProblemKind::Newsvendor => GroundTruth::newsvendor_default(),
        ProblemKind::Portfolio => GroundTruth::portfolio_default(),
    }
}

pub fn build_shape(problem: ProblemKind, set: &SetSpec, samples: &SampleSet) -> Result<ShapeParameter> {
    match problem {
        ProblemKind::Newsvendor => {
            let mut p = Table1Params { bessel_ci: set.bessel, ..Default::default() };
            match (set.kind, set.radius) {
                (SetKind::Wasserstein, Some(r)) => p.wasserstein_r = r,
                (SetKind::Burg, Some(r)) => p.burg_r = r,
                _ => {}
            }
            build_table1(samples, set.kind, &p)
        }
        ProblemKind::Portfolio => {
            let mut p = Table2Params::default();
            match (set.kind, set.radius) {
                (SetKind::Wasserstein, Some(r)) => p.wasserstein_r = r,
                (SetKind::TotalVariation, Some(r)) => p.tv_r = r,
                _ => {}
            }
            build_table2(samples, set.kind, &p)
        }
    }
}

pub fn build_problem(problem: ProblemKind, set: &SetSpec, samples: &SampleSet) -> Result<TroProblem> {
    let shape = build_shape(problem, set, samples)?;
    match problem {
        ProblemKind::Newsvendor => TroProblem::newsvendor(NewsvendorParams::default(), shape, samples),
        ProblemKind::Portfolio => TroProblem::portfolio(PortfolioParams::for_samples(samples), shape, samples),
    }
}

pub fn true_values(cfg: &ExperimentConfig) -> TrueValues {
    let mut t = cfg.truth.clone().unwrap_or_else(|| configured(cfg.problem));
    if let Some(v) = cfg.v_star {
        t.v_star = v;
        t.source = "config override".into();
    }
    t
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
}

impl Ctx<'_> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        &self,
        set: &str,
        n: Option<usize>,
        theta: Option<f64>,
        rep: Option<usize>,
        seed: Option<u64>,
        metric: impl Into<String>,
        value: f64,
    ) -> Record {
        Record {
            experiment: self.cfg.experiment.name().into(),
            problem: self.cfg.problem.name().into(),
            set: set.into(),
            n,
            theta,
            rep,
            seed,
            metric: metric.into(),
            value,
        }
    }

    fn checks(&self, set: &str, n: Option<usize>, rep: Option<usize>, seed: Option<u64>, r: &CheckReport) -> Vec<Record> {
        vec![
            self.rec(set, n, None, rep, seed, format!("{}:pass", r.check), if r.pass { 1.0 } else { 0.0 }),
            self.rec(set, n, None, rep, seed, format!("{}:observed", r.check), r.observed),
            self.rec(set, n, None, rep, seed, format!("{}:bound", r.check), r.bound),
        ]
    }
}

fn decision_metrics(d: &Decision) -> Vec<(String, f64)> {
    match d {
        Decision::Newsvendor(x) => vec![("x".into(), *x)],
        Decision::Portfolio { x, t } => {
            let mut v: Vec<(String, f64)> = x.iter().enumerate().map(|(i, &w)| (format!("x{}", i + 1), w)).collect();
            v.push(("t".into(), *t));
            v
        }
    }
}

fn grid_thetas(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    match &cfg.thetas {
        ThetaRule::Grid(g) => Ok(g.clone()),
        ThetaRule::Inverse(_) => Err(TroError::InvalidParameter(format!(
            "{} needs a θ grid, not a c/N rule",
            cfg.experiment
        ))),
    }
}

/// Optimal value and decision on a θ grid, one shared sample per N.
pub fn run_theta_sweep(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let thetas = grid_thetas(cfg)?;
    let ctx = Ctx { cfg };
    let gt = ground_truth(cfg.problem);
    let cells: Vec<(usize, &SetSpec)> = cfg.sizes.iter().flat_map(|&n| cfg.sets.iter().map(move |s| (n, s))).collect();
    let out: Vec<Vec<Record>> = cells
        .par_iter()
        .map(|&(n, set)| {
            let seed = derive_seed(cfg.seed, n, 0, 0);
            let res = sample(&gt, n, seed).and_then(|s| build_problem(cfg.problem, set, &s));
            let mut recs = Vec::new();
            match res {
                Err(_) => {
                    for &t in &thetas {
                        recs.push(ctx.rec(&set.id, Some(n), Some(t), Some(0), Some(seed), "error", f64::NAN));
                    }
                }
                Ok(prob) => {
                    for p in theta_sweep(&prob, &thetas, &cfg.solver) {
                        let at = |m: String, v: f64| ctx.rec(&set.id, Some(n), Some(p.theta), Some(0), Some(seed), m, v);
                        match &p.result {
                            Ok(r) => {
                                recs.push(at("value".into(), r.value));
                                for (m, v) in decision_metrics(&r.decision) {
                                    recs.push(at(m, v));
                                }
                            }
                            Err(_) => recs.push(at("error".into(), f64::NAN)),
                        }
                    }
                }
            }
            recs
        })
        .collect();
    Ok(sort_sets(cfg, out.into_iter().flatten().collect()))
}

/// Stable reorder by configured set order (cells are produced N-major).
fn sort_sets(cfg: &ExperimentConfig, mut recs: Vec<Record>) -> Vec<Record> {
    let pos = |id: &str| cfg.sets.iter().position(|s| s.id == id).unwrap_or(usize::MAX);
    recs.sort_by_key(|r| pos(&r.set));
    recs
}

/// Per replication: v̂ at every θ for every set, sharing the replication's
/// sample across sets (and across θ unless `independent_theta_samples`).
fn replicate(
    cfg: &ExperimentConfig,
    n: usize,
    rep: usize,
    thetas: &[f64],
) -> Vec<Vec<(u64, Result<SolveResult>)>> {
    let gt = ground_truth(cfg.problem);
    let shared = (!cfg.independent_theta_samples).then(|| {
        let seed = derive_seed(cfg.seed, n, 0, rep);
        (seed, sample(&gt, n, seed))
    });
    cfg.sets
        .iter()
        .map(|set| {
            let mut warm: Option<Decision> = None;
            let shared_prob = shared.as_ref().map(|(seed, s)| {
                (*seed, s.as_ref().map_err(Clone::clone).and_then(|s| build_problem(cfg.problem, set, s)))
            });
            thetas
                .iter()
                .enumerate()
                .map(|(i, &theta)| {
                    let owned;
                    let (seed, prob) = match &shared_prob {
                        Some((seed, p)) => (*seed, p.as_ref().map_err(Clone::clone)),
                        None => {
                            let seed = derive_seed(cfg.seed, n, i, rep);
                            owned = sample(&gt, n, seed).and_then(|s| build_problem(cfg.problem, set, &s));
                            (seed, owned.as_ref().map_err(Clone::clone))
                        }
                    };
                    let r = prob.and_then(|p| p.solve(theta, &cfg.solver, warm.as_ref()));
                    if let (Ok(r), true) = (&r, shared.is_some()) {
                        warm = Some(r.decision.clone());
                    }
                    (seed, r)
                })
                .collect()
        })
        .collect()
}

/// Monte Carlo mean, bias and spread of v̂_N(θ) with bootstrap intervals.
pub fn run_bias_std(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let thetas = grid_thetas(cfg)?;
    let truth = true_values(cfg);
    let ctx = Ctx { cfg };
    let mut recs = Vec::new();
    for &n in &cfg.sizes {
        // runs[rep][set][θ]
        let runs: Vec<_> = (0..cfg.replications).into_par_iter().map(|rep| replicate(cfg, n, rep, &thetas)).collect();
        for (si, set) in cfg.sets.iter().enumerate() {
            let mut cis = Vec::with_capacity(thetas.len());
            for (ti, &theta) in thetas.iter().enumerate() {
                let mut ok = Vec::with_capacity(cfg.replications);
                for (rep, run) in runs.iter().enumerate() {
                    let (seed, r) = &run[si][ti];
                    match r {
                        Ok(r) => {
                            ok.push(r.value);
                            recs.push(ctx.rec(&set.id, Some(n), Some(theta), Some(rep), Some(*seed), "value", r.value));
                        }
                        Err(_) => recs.push(ctx.rec(&set.id, Some(n), Some(theta), Some(rep), Some(*seed), "error", f64::NAN)),
                    }
                }
                let failures = (cfg.replications - ok.len()) as f64;
                let agg = |m: &str, v: f64| ctx.rec(&set.id, Some(n), Some(theta), None, None, m, v);
                recs.push(agg("failures", failures));
                if ok.is_empty() {
                    continue;
                }
                let m = mean(&ok);
                let bseed = derive_seed(splitmix64(cfg.seed ^ BOOT_SALT), n, ti, si);
                let (lo, hi) = bootstrap_mean_ci(&ok, 0.99, cfg.bootstrap_resamples, bseed);
                recs.push(agg("mean", m));
                recs.push(agg("bias", m - truth.v_star));
                recs.push(agg("std", std_dev(&ok)));
                recs.push(agg("var", variance(&ok)));
                recs.push(agg("bias-ci-lo", lo - truth.v_star));
                recs.push(agg("bias-ci-hi", hi - truth.v_star));
                cis.push((theta, lo - truth.v_star, hi - truth.v_star));
            }
            let cross = zero_crossing(&cis).unwrap_or(f64::NAN);
            recs.push(ctx.rec(&set.id, Some(n), None, None, None, "zero-crossing-theta", cross));
        }
    }
    Ok(recs)
}

/// First θ whose bias interval covers 0 with an interval wholly below 0
/// somewhere to its left and one wholly above 0 somewhere to its right.
/// `cis` holds (θ, lo, hi) in increasing θ.
pub fn zero_crossing(cis: &[(f64, f64, f64)]) -> Option<f64> {
    (0..cis.len()).find_map(|j| {
        let (theta, lo, hi) = cis[j];
        let covers = lo <= 0.0 && hi >= 0.0;
        let left = cis[..j].iter().any(|c| c.2 < 0.0);
        let right = cis[j + 1..].iter().any(|c| c.1 > 0.0);
        (covers && left && right).then_some(theta)
    })
}

/// v̂ at θ_N for every (N, rep); `f(set, n, θ, vals)` turns the successful
/// values of one (set, N) cell into aggregate records.
fn per_n_runs(
    cfg: &ExperimentConfig,
    mut emit: impl FnMut(&SetSpec, usize, f64, &[(usize, u64, f64)], &mut Vec<Record>),
) -> Result<Vec<Record>> {
    let ctx = Ctx { cfg };
    let truth = true_values(cfg);
    let mut recs = Vec::new();
    for &n in &cfg.sizes {
        let thetas = cfg.thetas.thetas(n);
        if thetas.len() != 1 {
            return Err(TroError::InvalidParameter(format!("{} needs a single θ per N (use c/N)", cfg.experiment)));
        }
        let theta = thetas[0];
        let runs: Vec<_> = (0..cfg.replications).into_par_iter().map(|rep| replicate(cfg, n, rep, &thetas)).collect();
        for (si, set) in cfg.sets.iter().enumerate() {
            let mut ok = Vec::new();
            for (rep, run) in runs.iter().enumerate() {
                let (seed, r) = &run[si][0];
                let at = |m: &str, v: f64| ctx.rec(&set.id, Some(n), Some(theta), Some(rep), Some(*seed), m, v);
                match r {
                    Ok(r) => {
                        recs.push(at("value", r.value));
                        if cfg.experiment == super::config::Experiment::Convergence {
                            recs.push(at("abs-diff", (r.value - truth.v_star).abs()));
                        }
                        ok.push((rep, *seed, r.value));
                    }
                    Err(_) => recs.push(at("error", f64::NAN)),
                }
            }
            recs.push(ctx.rec(&set.id, Some(n), Some(theta), None, None, "failures", (cfg.replications - ok.len()) as f64));
            if !ok.is_empty() {
                emit(set, n, theta, &ok, &mut recs);
            }
        }
    }
    Ok(recs)
}

/// |v̂_N(θ_N) − v⋆| per seed, with the median and mean over seeds.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let truth = true_values(cfg);
    let ctx = Ctx { cfg };
    per_n_runs(cfg, |set, n, theta, ok, recs| {
        let d: Vec<f64> = ok.iter().map(|(_, _, v)| (v - truth.v_star).abs()).collect();
        recs.push(ctx.rec(&set.id, Some(n), Some(theta), None, None, "median-abs-diff", median(&d)));
        recs.push(ctx.rec(&set.id, Some(n), Some(theta), None, None, "mean-abs-diff", mean(&d)));
    })
}

/// Kolmogorov–Smirnov distance of √N(v̂ − v⋆)/s to N(0, 1).
pub fn run_ks(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let truth = true_values(cfg);
    let s = match cfg.ks_divisor {
        KsDivisor::StdDev => truth.v_star_variance.sqrt(),
        KsDivisor::Variance => truth.v_star_variance,
    };
    if !(s > 0.0) {
        return Err(TroError::InvalidParameter("true-value variance must be positive".into()));
    }
    let ctx = Ctx { cfg };
    per_n_runs(cfg, |set, n, theta, ok, recs| {
        let z: Vec<f64> = ok.iter().map(|(_, _, v)| (n as f64).sqrt() * (v - truth.v_star) / s).collect();
        for ((rep, seed, _), zi) in ok.iter().zip(&z) {
            recs.push(ctx.rec(&set.id, Some(n), Some(theta), Some(*rep), Some(*seed), "z", *zi));
        }
        recs.push(ctx.rec(&set.id, Some(n), Some(theta), None, None, "ks-stat", ks_normal(&z)));
    })
}

/// Value tolerance of one solve: golden-section bracket times the largest
/// slope, or the certified relative gap.
fn solver_value_tol(cfg: &ExperimentConfig, values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    match cfg.problem {
        ProblemKind::Newsvendor => {
            let p = NewsvendorParams::default();
            (p.p + p.c) * cfg.solver.x_tol
        }
        ProblemKind::Portfolio => cfg.solver.gap_tol * scale,
    }
}

/// Sample losses s_i(z) at decision `z`.
fn sample_losses(problem: &TroProblem, z: &[f64]) -> Vec<f64> {
    match problem {
        TroProblem::Newsvendor(i) => i.xi.iter().map(|&xi| shortfall(z[0], xi)).collect(),
        TroProblem::Portfolio(i) => {
            let n = i.assets();
            i.sample_losses(&z[..n]).iter().map(|&r| i.params.loss_from_return(z[n], r)).collect()
        }
    }
}

/// Largest relative gap between the two evaluation routes of the divergence
/// worst case over a few grid decisions.
fn divergence_cross_check(problem: &TroProblem, grid: &DecisionGrid) -> Result<Option<CheckReport>> {
    let step = (grid.len() / 7).max(1);
    let mut worst: f64 = 0.0;
    let name = match problem.shape() {
        ShapeParameter::BurgDivergence { radius, .. } => {
            for z in grid.points.iter().step_by(step) {
                let s = sample_losses(problem, z);
                let (v, ..) = burg_worst_case(&s, *radius)?;
                let d = burg_dual_nested(&s, *radius)?;
                worst = worst.max((v - d).abs() / v.abs().max(1.0));
            }
            "burg-primal-dual"
        }
        ShapeParameter::TotalVariation { radius, .. } => {
            for z in grid.points.iter().step_by(step) {
                let s = sample_losses(problem, z);
                let (v, _) = tv_greedy(&s, *radius);
                let d = tv_dual(&s, *radius);
                worst = worst.max((v - d).abs() / v.abs().max(1.0));
            }
            "tv-greedy-dual"
        }
        _ => return Ok(None),
    };
    Ok(Some(CheckReport::new(name, worst, 1e-6, "relative gap over grid decisions")))
}

/// Property suites; every check is one `<name>:pass|observed|bound` triple.
pub fn run_properties(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    cfg.validate()?;
    let thetas = grid_thetas(cfg)?;
    let ctx = Ctx { cfg };
    let gt = ground_truth(cfg.problem);
    let n = cfg.sizes[0];

    // sweep-based checks: (set, seed) cells
    let cells: Vec<(usize, usize)> =
        (0..cfg.sets.len()).flat_map(|si| (0..cfg.replications).map(move |rep| (si, rep))).collect();
    let sweep_recs: Vec<Result<Vec<Record>>> = cells
        .par_iter()
        .map(|&(si, rep)| {
            let set = &cfg.sets[si];
            let seed = derive_seed(cfg.seed, n, 0, rep);
            let samples = sample(&gt, n, seed)?;
            let prob = build_problem(cfg.problem, set, &samples)?;
            let centered = contains_center(prob.shape(), &prob.empirical())?;
            let mut recs = vec![ctx.rec(&set.id, Some(n), None, Some(rep), Some(seed), "contains-center", centered as u8 as f64)];
            if !centered {
                // the sample law is not a star center: only flag it
                let r = CheckReport::new("non-star-center", 0.0, 0.0, "sample law outside the set");
                recs.extend(ctx.checks(&set.id, Some(n), Some(rep), Some(seed), &r));
                return Ok(recs);
            }
            let sweep = theta_sweep(&prob, &thetas, &cfg.solver);
            let mut values = Vec::with_capacity(sweep.len());
            let mut decisions = Vec::with_capacity(sweep.len());
            for p in &sweep {
                let r = p.result.as_ref().map_err(Clone::clone)?;
                values.push(r.value);
                decisions.push(r.decision.as_vec());
            }
            let grid = match cfg.problem {
                ProblemKind::Newsvendor => DecisionGrid::newsvendor_default(&samples)?,
                ProblemKind::Portfolio => DecisionGrid::portfolio_default(&PortfolioParams::for_samples(&samples))?,
            };
            let panel_seed = derive_seed(splitmix64(cfg.seed ^ PANEL_SALT), n, si, rep);
            let panel = DistributionPanel::generate(prob.shape(), cfg.panel_size, panel_seed)?;
            let cn = c_n(&prob, &grid, &panel);
            recs.push(ctx.rec(&set.id, Some(n), None, Some(rep), Some(seed), "c-n", cn.value));
            let conc = check_concavity(&thetas, &values, cn.value)?;
            for r in conc.checks() {
                recs.extend(ctx.checks(&set.id, Some(n), Some(rep), Some(seed), &r));
            }
            recs.extend(ctx.checks(&set.id, Some(n), Some(rep), Some(seed), &check_monotone(&values)));
            let lip = check_lipschitz(&thetas, &values, cn.value, solver_value_tol(cfg, &values));
            recs.extend(ctx.checks(&set.id, Some(n), Some(rep), Some(seed), &lip));
            // solution-set drift between neighbouring θ: reported, not asserted
            let shift = decisions
                .windows(2)
                .map(|w| w[0].iter().zip(&w[1]).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
                .fold(0.0, f64::max);
            recs.push(ctx.rec(&set.id, Some(n), None, Some(rep), Some(seed), "decision-shift", shift));
            if let Some(r) = divergence_cross_check(&prob, &grid)? {
                recs.extend(ctx.checks(&set.id, Some(n), Some(rep), Some(seed), &r));
            }
            Ok(recs)
        })
        .collect();
    let mut recs = Vec::new();
    for r in sweep_recs {
        recs.extend(r?);
    }

    // star-center and hierarchy suites on small samples
    let seed = derive_seed(cfg.seed, SUITE_N, 0, 0);
    let small = sample(&gt, SUITE_N, seed)?;
    let center = small.empirical();
    for (si, set) in cfg.sets.iter().enumerate() {
        let sp = build_shape(cfg.problem, set, &small)?;
        if !contains_center(&sp, &center)? {
            continue;
        }
        let panel_seed = derive_seed(splitmix64(cfg.seed ^ PANEL_SALT), SUITE_N, si, 0);
        let panel = DistributionPanel::generate(&sp, 8, panel_seed)?;
        let star = star_center_suite(&sp, &center, &panel, &alpha_grid())?;
        recs.extend(ctx.checks(&set.id, Some(SUITE_N), Some(0), Some(seed), &star));
        let hier = hierarchy_suite(&sp, &center, &panel, &theta_grid(10))?;
        recs.extend(ctx.checks(&set.id, Some(SUITE_N), Some(0), Some(seed), &hier));
    }

    if cfg.problem == ProblemKind::Newsvendor {
        let b = two_point_check(&theta_grid(10))?;
        recs.extend(ctx.checks("two-point", None, None, None, &b));
        let sizes = [10, 50, 250];
        let trend = tv_hausdorff_trend(&sizes, 0.2, 200, 8, splitmix64(cfg.seed))?;
        for (&n, &d) in trend.sizes.iter().zip(&trend.distances) {
            recs.push(ctx.rec("tv-fixed-radius", Some(n), None, None, None, "hausdorff", d));
        }
        let ups = trend.distances.windows(2).filter(|w| w[1] >= w[0]).count();
        let r = CheckReport::new("hausdorff-trend", ups as f64, 0.0, "non-decreasing steps along N");
        recs.extend(ctx.checks("tv-fixed-radius", None, None, None, &r));
    }
    Ok(recs)
}
