//! Numerical checks on v̂(θ) sweeps: the 2C_N Lipschitz bound, concavity with
//! the 4C_Nθ(1−θ) remainder bound, and monotonicity.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TroError};

/// Relative slack of the sweep checks, times max|v̂|.
pub const SWEEP_REL_TOL: f64 = 1e-6;

/// One pass/fail line: `observed` is compared against `bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, observed: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self { check: check.into(), observed, bound, pass: observed <= bound, detail: detail.into() }
    }
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE)
}

/// max over θ pairs of |v̂(θᵢ) − v̂(θⱼ)| − 2C_N|θᵢ − θⱼ|, against 1e−6 + `solver_tol`.
pub fn check_lipschitz(thetas: &[f64], values: &[f64], cn: f64, solver_tol: f64) -> CheckReport {
    let mut worst = f64::NEG_INFINITY;
    let mut at = (0, 0);
    for i in 0..thetas.len() {
        for j in i + 1..thetas.len() {
            let v = (values[i] - values[j]).abs() - 2.0 * cn * (thetas[i] - thetas[j]).abs();
            if v > worst {
                worst = v;
                at = (i, j);
            }
        }
    }
    let worst = if thetas.len() < 2 { 0.0 } else { worst.max(0.0) };
    CheckReport::new(
        "lipschitz",
        worst,
        1e-6 + solver_tol,
        format!("C_N={cn}; worst pair θ=({}, {})", thetas.get(at.0).unwrap_or(&0.0), thetas.get(at.1).unwrap_or(&0.0)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    /// Largest second difference v̂(θ₋) − 2v̂(θ) + v̂(θ₊).
    pub max_second_difference: f64,
    /// Largest (1−θ)v̂(0) + θv̂(1) − v̂(θ).
    pub lower_bound_violation: f64,
    /// Largest v̂(θ) − interpolant − 4C_Nθ(1−θ).
    pub remainder_excess: f64,
    /// Largest remainder v̂(θ) − interpolant itself.
    pub max_remainder: f64,
    /// 1e−6 · max|v̂|.
    pub tolerance: f64,
    pub pass: bool,
}

impl ConcavityReport {
    pub fn checks(&self) -> Vec<CheckReport> {
        vec![
            CheckReport::new("concavity-second-difference", self.max_second_difference, self.tolerance, ""),
            CheckReport::new("concavity-lower-bound", self.lower_bound_violation, self.tolerance, ""),
            CheckReport::new(
                "concavity-remainder",
                self.remainder_excess,
                self.tolerance,
                format!("max remainder {}", self.max_remainder),
            ),
        ]
    }
}

/// `thetas` must be a uniform grid on [0, 1] with at least 3 points.
pub fn check_concavity(thetas: &[f64], values: &[f64], cn: f64) -> Result<ConcavityReport> {
    let k = thetas.len();
    if k < 3 || values.len() != k {
        return Err(TroError::InvalidParameter("concavity needs ≥ 3 θ points with one value each".into()));
    }
    let h = thetas[1] - thetas[0];
    let uniform = thetas.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9);
    if !uniform || thetas[0].abs() > 1e-12 || (thetas[k - 1] - 1.0).abs() > 1e-12 {
        return Err(TroError::InvalidParameter("θ grid must be uniform on [0, 1]".into()));
    }
    let tol = SWEEP_REL_TOL * scale(values);
    let max_second_difference = values
        .windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::NEG_INFINITY, f64::max);
    let (v0, v1) = (values[0], values[k - 1]);
    let mut lower = f64::NEG_INFINITY;
    let mut excess = f64::NEG_INFINITY;
    let mut max_rem = f64::NEG_INFINITY;
    for (&t, &v) in thetas.iter().zip(values) {
        let rem = v - ((1.0 - t) * v0 + t * v1);
        lower = lower.max(-rem);
        max_rem = max_rem.max(rem);
        excess = excess.max(rem - 4.0 * cn * t * (1.0 - t));
    }
    Ok(ConcavityReport {
        max_second_difference,
        lower_bound_violation: lower,
        remainder_excess: excess,
        max_remainder: max_rem,
        tolerance: tol,
        pass: max_second_difference <= tol && lower <= tol && excess <= tol,
    })
}

/// Largest drop v̂(θᵢ) − v̂(θⱼ) over i < j, against 1e−6·max|v̂|.
pub fn check_monotone(values: &[f64]) -> CheckReport {
    let mut run_max = f64::NEG_INFINITY;
    let mut drop: f64 = 0.0;
    for &v in values {
        run_max = run_max.max(v);
        drop = drop.max(run_max - v);
    }
    CheckReport::new("monotone", drop, SWEEP_REL_TOL * scale(values), "")
}
