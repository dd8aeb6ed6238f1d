//! Portfolio minimization over {x ∈ Δₙ} × [−T, T].
//!
//! The default method is the ellipsoid method in z = (x₁, …, xₙ₋₁, t) with
//! xₙ = 1 − Σ xⱼ eliminated. Every objective cut yields the lower bound
//! f(z) − √(gᵀPg), so the method stops on a certified gap. The projected
//! subgradient method is available as an alternative.

use rand::Rng;

use super::golden::golden_section;
use super::{Decision, PortfolioMethod, SolveResult, SolveStatus, SolverConfig};
use crate::ambiguity::ShapeParameter;
use crate::distributions::SampleSet;
use crate::error::{Result, TroError};
use crate::objective::PortfolioParams;
use crate::reformulations::PortfolioInstance;
use crate::rng::rng_from_seed;

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut cum = 0.0;
    let mut shift = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        cum += v[i];
        let cand = (cum - 1.0) / (k + 1) as f64;
        if v[i] - cand > 0.0 {
            shift = cand;
        }
    }
    v.iter().map(|&a| (a - shift).max(0.0)).collect()
}

/// Sample VaR level of the losses −xᵀξ̂ᵢ (the ⌈αN⌉-th smallest).
fn sample_var(losses: &mut [f64], alpha: f64) -> f64 {
    losses.sort_by(f64::total_cmp);
    let k = ((alpha * losses.len() as f64).ceil() as usize).clamp(1, losses.len());
    losses[k - 1]
}

pub(super) fn solve_instance(
    inst: &PortfolioInstance,
    theta: f64,
    cfg: &SolverConfig,
    warm: Option<&Decision>,
) -> Result<SolveResult> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(TroError::InvalidParameter(format!("theta {theta}")));
    }
    let warm = match warm {
        Some(Decision::Portfolio { x, t }) if x.len() == inst.assets() => Some((x.clone(), *t)),
        _ => None,
    };
    if inst.assets() == 1 {
        return solve_single_asset(inst, theta, cfg);
    }
    match cfg.portfolio_method {
        PortfolioMethod::Ellipsoid => ellipsoid(inst, theta, cfg, warm),
        PortfolioMethod::Subgradient => subgradient(inst, theta, cfg, warm),
    }
}

fn solve_single_asset(inst: &PortfolioInstance, theta: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    let tb = inst.params.t_bound;
    let mut err = None;
    let (t, _) = golden_section(
        |t| match inst.tro_objective(theta, &[1.0], t) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::INFINITY
            }
        },
        -tb,
        tb,
        cfg.x_tol,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let value = inst.tro_objective(theta, &[1.0], t)?;
    Ok(SolveResult {
        decision: Decision::Portfolio { x: vec![1.0], t },
        value,
        status: SolveStatus::Converged,
        iterations: 0,
        tolerance: cfg.x_tol,
    })
}

fn unpack(z: &[f64]) -> (Vec<f64>, f64) {
    let d = z.len();
    let mut x: Vec<f64> = z[..d - 1].to_vec();
    x.push(1.0 - x.iter().sum::<f64>());
    (x, z[d - 1])
}

/// Snap tiny negative weights from floating-point drift back onto the simplex.
fn clean(mut x: Vec<f64>) -> Vec<f64> {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

fn ellipsoid(
    inst: &PortfolioInstance,
    theta: f64,
    cfg: &SolverConfig,
    warm: Option<(Vec<f64>, f64)>,
) -> Result<SolveResult> {
    let n = inst.assets();
    let d = n; // n−1 weights plus t
    let df = d as f64;
    let tb = inst.params.t_bound;
    let (x0, t0) = warm.unwrap_or_else(|| (vec![1.0 / n as f64; n], 0.0));
    let mut z: Vec<f64> = x0[..n - 1].to_vec();
    z.push(t0.clamp(-tb, tb));
    // axis-aligned start containing [0,1]^{n−1} × [−T, T]
    let mut l = vec![vec![0.0; d]; d];
    for k in 0..d - 1 {
        l[k][k] = df.sqrt() * 1.0;
    }
    l[d - 1][d - 1] = df.sqrt() * (tb + z[d - 1].abs());

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut status = SolveStatus::IterationCap;
    let s_factor = df * df / (df * df - 1.0);

    while iterations < cfg.max_iter {
        iterations += 1;
        // cut direction g and depth h ≥ 0 (keep {y : gᵀ(y − z) ≤ −h})
        let (x, t) = unpack(&z);
        let mut cut: Option<(Vec<f64>, f64)> = None;
        for j in 0..n - 1 {
            if z[j] < 0.0 {
                let mut g = vec![0.0; d];
                g[j] = -1.0;
                cut = Some((g, -z[j]));
                break;
            }
        }
        if cut.is_none() && x[n - 1] < 0.0 {
            let mut g = vec![1.0; d];
            g[d - 1] = 0.0;
            cut = Some((g, -x[n - 1]));
        }
        if cut.is_none() && t.abs() > tb {
            let mut g = vec![0.0; d];
            g[d - 1] = t.signum();
            cut = Some((g, t.abs() - tb));
        }
        let objective_cut = cut.is_none();
        let (g, h) = match cut {
            Some(c) => c,
            None => {
                let vg = inst.tro(theta, &x, t, true)?;
                // chain rule through xₙ = 1 − Σ xⱼ
                let mut g = vec![0.0; d];
                for j in 0..n - 1 {
                    g[j] = vg.grad[j] - vg.grad[n - 1];
                }
                g[d - 1] = vg.grad[n];
                if best.as_ref().is_none_or(|b| vg.value < b.0) {
                    best = Some((vg.value, x.clone(), t));
                }
                let fb = best.as_ref().unwrap().0;
                (g, vg.value - fb)
            }
        };
        // u = Lᵀg / ‖Lᵀg‖
        let mut lt_g = vec![0.0; d];
        for i in 0..d {
            for k in 0..d {
                lt_g[i] += l[k][i] * g[k];
            }
        }
        let norm = lt_g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if objective_cut {
            let (fz, fb) = (h + best.as_ref().unwrap().0, best.as_ref().unwrap().0);
            lower = lower.max(fz - norm);
            let gap = fb - lower;
            if gap <= cfg.gap_tol * fb.abs().max(1.0) {
                status = SolveStatus::Converged;
                break;
            }
        }
        if norm <= 0.0 || !norm.is_finite() {
            if objective_cut {
                // zero subgradient at a feasible point: it is optimal
                lower = best.as_ref().unwrap().0;
                status = SolveStatus::Converged;
            }
            break;
        }
        let alpha = h / norm;
        if alpha >= 1.0 {
            if objective_cut {
                // the remaining ellipsoid holds no better point
                lower = best.as_ref().unwrap().0;
                status = SolveStatus::Converged;
            }
            break;
        }
        let u: Vec<f64> = lt_g.iter().map(|v| v / norm).collect();
        let lu: Vec<f64> = (0..d).map(|i| (0..d).map(|k| l[i][k] * u[k]).sum()).collect();
        let step = (1.0 + df * alpha) / (df + 1.0);
        for i in 0..d {
            z[i] -= step * lu[i];
        }
        let kappa = 2.0 * (1.0 + df * alpha) / ((df + 1.0) * (1.0 + alpha));
        let gamma = 1.0 - (1.0 - kappa).max(0.0).sqrt();
        let scale = (s_factor * (1.0 - alpha * alpha)).sqrt();
        for i in 0..d {
            for k in 0..d {
                l[i][k] = scale * (l[i][k] - gamma * lu[i] * u[k]);
            }
        }
    }
    let (_, x, t) = best.ok_or(TroError::InvalidParameter("ellipsoid method found no feasible point".into()))?;
    let x = clean(x);
    let value = inst.tro_objective(theta, &x, t)?;
    Ok(SolveResult {
        decision: Decision::Portfolio { x, t },
        value,
        status,
        iterations,
        tolerance: (value - lower).max(0.0),
    })
}

fn subgradient(
    inst: &PortfolioInstance,
    theta: f64,
    cfg: &SolverConfig,
    warm: Option<(Vec<f64>, f64)>,
) -> Result<SolveResult> {
    let n = inst.assets();
    let tb = inst.params.t_bound;
    let alpha = inst.params.alpha;
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some((x, _)) = &warm {
        starts.push(x.clone());
    }
    starts.push(vec![1.0 / n as f64; n]);
    for k in 0..n {
        if starts.len() >= cfg.restarts.max(1) + warm.is_some() as usize {
            break;
        }
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        starts.push(e);
    }
    let mut rng = rng_from_seed(cfg.seed);
    while starts.len() < cfg.restarts.max(1) + warm.is_some() as usize {
        let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
        let s: f64 = raw.iter().sum();
        starts.push(raw.iter().map(|v| v / s).collect());
    }

    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut total_iters = 0;
    let mut stable = true;
    for x0 in starts {
        let mut x = x0;
        let mut losses = inst.sample_losses(&x);
        let mut t = sample_var(&mut losses, alpha).clamp(-tb, tb);
        let mut local_best = f64::INFINITY;
        let tail_start = cfg.max_iter - cfg.max_iter / 10;
        let mut tail_ref = f64::NAN;
        for k in 0..cfg.max_iter {
            total_iters += 1;
            let vg = inst.tro(theta, &x, t, true)?;
            if vg.value < local_best {
                local_best = vg.value;
            }
            if best.as_ref().is_none_or(|b| vg.value < b.0) {
                best = Some((vg.value, x.clone(), t));
            }
            if k == tail_start {
                tail_ref = local_best;
            }
            let gn = vg.grad.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            let step = cfg.step_a / (k as f64 + cfg.step_b) / gn;
            let moved: Vec<f64> = (0..n).map(|j| x[j] - step * vg.grad[j]).collect();
            x = project_simplex(&moved);
            t = (t - step * vg.grad[n]).clamp(-tb, tb);
        }
        if tail_ref.is_finite() && (tail_ref - local_best).abs() > 1e-5 * local_best.abs().max(1e-12) {
            stable = false;
        }
    }
    let (_, x, t) = best.expect("at least one start");
    let value = inst.tro_objective(theta, &x, t)?;
    Ok(SolveResult {
        decision: Decision::Portfolio { x, t },
        value,
        status: if stable { SolveStatus::Converged } else { SolveStatus::IterationCap },
        iterations: total_iters,
        tolerance: f64::NAN,
    })
}

/// Minimize the portfolio trade-off objective over the simplex × t-box.
pub fn solve_portfolio(
    params: &PortfolioParams,
    sp: &ShapeParameter,
    theta: f64,
    samples: &SampleSet,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    let inst = PortfolioInstance::new(*params, sp.clone(), samples)?;
    solve_instance(&inst, theta, cfg, None)
}
