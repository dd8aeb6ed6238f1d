use super::golden::golden_section_checked;
use super::{Decision, SolveResult, SolveStatus, SolverConfig};
use crate::ambiguity::ShapeParameter;
use crate::distributions::SampleSet;
use crate::error::{Result, TroError};
use crate::objective::NewsvendorParams;
use crate::reformulations::NewsvendorInstance;

/// Search interval end X_hi = max(4·max ξ̂, 4μ̂ + 40σ̂).
///
/// Beyond max ξ̂ the sample terms (and hence the Wasserstein and divergence
/// worst cases) are flat, the interval term is flat past μ̂ − γ, and Scarf's
/// term has slope of magnitude ≤ σ²/(4(x−μ̂)²); so the objective increases at
/// rate ≥ (c−h)/2 once x > max(max ξ̂, μ̂ + σ̂·√((p−h)/(2(c−h)))). For the
/// inventory study that threshold is below X_hi.
pub fn newsvendor_upper_bound(xi: &[f64]) -> f64 {
    let n = xi.len() as f64;
    let max = xi.iter().copied().fold(0.0, f64::max);
    let mean = xi.iter().sum::<f64>() / n;
    let var = xi.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (4.0 * max).max(4.0 * mean + 40.0 * var.sqrt()).max(1.0)
}

pub(super) fn solve_instance(inst: &NewsvendorInstance, theta: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(TroError::InvalidParameter(format!("theta {theta}")));
    }
    let hi = newsvendor_upper_bound(&inst.xi);
    // f(0) is often exactly 0, so take the magnitude across the bracket
    let scale = [0.0, 0.5 * hi, hi]
        .iter()
        .map(|&x| inst.tro_objective(theta, x).map(f64::abs))
        .try_fold(1.0f64, |m, v| v.map(|v| m.max(v)))?;
    let (x, value, iterations) =
        golden_section_checked(|x| inst.tro_objective(theta, x), 0.0, hi, cfg.x_tol, 1e-9 * scale)?;
    Ok(SolveResult {
        decision: Decision::Newsvendor(x),
        value,
        status: SolveStatus::Converged,
        iterations,
        tolerance: cfg.x_tol,
    })
}

/// Minimize the inventory trade-off objective over x ≥ 0.
pub fn solve_newsvendor(
    params: &NewsvendorParams,
    sp: &ShapeParameter,
    theta: f64,
    samples: &SampleSet,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
    solve_instance(&NewsvendorInstance::new(*params, sp.clone(), samples)?, theta, cfg)
}
