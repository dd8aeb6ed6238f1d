//! Type-1 Wasserstein distance between finite-support measures (ℓ1 ground norm).

use crate::distributions::DiscreteDistribution;
use crate::error::{Result, TroError};
use crate::lp::{self, LinearProgram};

/// Largest support accepted by the transportation LP.
pub const MAX_LP_SUPPORT: usize = 64;

/// W₁ on the real line: ∫ |F_a(z) − F_b(z)| dz, swept over the merged atoms.
pub fn wasserstein1_1d(a: &DiscreteDistribution, b: &DiscreteDistribution) -> f64 {
    let mut events: Vec<(f64, f64)> = a
        .support()
        .iter()
        .zip(a.weights())
        .map(|(p, &w)| (p[0], w))
        .chain(b.support().iter().zip(b.weights()).map(|(p, &w)| (p[0], -w)))
        .collect();
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut diff = 0.0;
    let mut total = 0.0;
    for k in 0..events.len() {
        diff += events[k].1;
        if let Some(next) = events.get(k + 1) {
            total += diff.abs() * (next.0 - events[k].0);
        }
    }
    total
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// W₁ in ℝⁿ by the transportation LP; both supports must have at most
/// [`MAX_LP_SUPPORT`] atoms.
pub fn wasserstein1_lp(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<f64> {
    let (m, n) = (a.len(), b.len());
    if m > MAX_LP_SUPPORT || n > MAX_LP_SUPPORT {
        return Err(TroError::TooLarge(format!(
            "transportation LP limited to {MAX_LP_SUPPORT} atoms per side, got {m}×{n}"
        )));
    }
    if a.dim() != b.dim() {
        return Err(TroError::InvalidDistribution("dimension mismatch".into()));
    }
    let mut c = Vec::with_capacity(m * n);
    for pa in a.support() {
        for pb in b.support() {
            c.push(l1(pa, pb));
        }
    }
    let mut a_eq = Vec::with_capacity(m + n);
    for i in 0..m {
        let mut row = vec![0.0; m * n];
        row[i * n..(i + 1) * n].fill(1.0);
        a_eq.push(row);
    }
    for j in 0..n {
        let mut row = vec![0.0; m * n];
        for i in 0..m {
            row[i * n + j] = 1.0;
        }
        a_eq.push(row);
    }
    let mut b_eq = a.weights().to_vec();
    b_eq.extend_from_slice(b.weights());
    let sol = lp::solve(&LinearProgram {
        c,
        a_eq,
        b_eq,
        ..Default::default()
    })?;
    Ok(sol.objective.max(0.0))
}

/// Exact W₁: the CDF formula on the line, the LP otherwise.
pub fn wasserstein1(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(TroError::InvalidDistribution("dimension mismatch".into()));
    }
    if a.dim() == 1 {
        Ok(wasserstein1_1d(a, b))
    } else {
        wasserstein1_lp(a, b)
    }
}
