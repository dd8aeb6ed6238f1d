use serde::{Deserialize, Serialize};

use crate::distributions::SampleSet;
use crate::error::{Result, TroError};
use crate::objective::PortfolioParams;

/// A finite stand-in for the feasible region 𝒳.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionGrid {
    /// Flat decision vectors (`[x]` or `[x₁, …, xₙ, t]`).
    pub points: Vec<Vec<f64>>,
    pub resolution: String,
}

impl DecisionGrid {
    pub fn new(points: Vec<Vec<f64>>, resolution: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(TroError::InvalidParameter("decision grid is empty".into()));
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d || p.iter().any(|v| !v.is_finite())) {
            return Err(TroError::InvalidParameter("grid points must be finite and of equal length".into()));
        }
        Ok(Self { points, resolution: resolution.into() })
    }

    /// `count` equally spaced order quantities on [0, 2·max ξ̂].
    pub fn newsvendor(samples: &SampleSet, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(TroError::InvalidParameter("need at least 2 grid points".into()));
        }
        let hi = 2.0 * samples.scalars().into_iter().fold(0.0, f64::max);
        let hi = if hi > 0.0 { hi } else { 1.0 };
        let points = (0..count).map(|i| vec![hi * i as f64 / (count - 1) as f64]).collect();
        Self::new(points, format!("newsvendor: {count} points on [0, {hi}]"))
    }

    pub fn newsvendor_default(samples: &SampleSet) -> Result<Self> {
        Self::newsvendor(samples, 401)
    }

    /// Simplex mesh with spacing `1/k` (`k` = 1/step) times `t_points`
    /// equally spaced values on [−t_bound, t_bound].
    pub fn portfolio(params: &PortfolioParams, step: f64, t_points: usize) -> Result<Self> {
        let k = (1.0 / step).round() as usize;
        if k == 0 || ((k as f64) * step - 1.0).abs() > 1e-9 || t_points < 2 {
            return Err(TroError::InvalidParameter(format!("mesh step {step} / t points {t_points}")));
        }
        let mut mesh = Vec::new();
        compositions(params.n, k, &mut Vec::with_capacity(params.n), &mut mesh);
        let tb = params.t_bound;
        let mut points = Vec::with_capacity(mesh.len() * t_points);
        for x in &mesh {
            for j in 0..t_points {
                let mut z: Vec<f64> = x.iter().map(|&c| c as f64 / k as f64).collect();
                z.push(-tb + 2.0 * tb * j as f64 / (t_points - 1) as f64);
                points.push(z);
            }
        }
        let res = format!("portfolio: simplex step {step} ({} weights) × {t_points} t on [−{tb}, {tb}]", mesh.len());
        Self::new(points, res)
    }

    pub fn portfolio_default(params: &PortfolioParams) -> Result<Self> {
        Self::portfolio(params, 0.05, 41)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// All vectors of `parts` non-negative integers summing to `total`.
fn compositions(parts: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for c in 0..=total {
        prefix.push(c);
        compositions(parts - 1, total - c, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_sizes() {
        let p = PortfolioParams::new(0.5, 0.95, 4, 2.0).unwrap();
        let g = DecisionGrid::portfolio_default(&p).unwrap();
        // C(23, 3) simplex points
        assert_eq!(g.len(), 1771 * 41);
        for z in &g.points {
            assert!((z[..4].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(z[..4].iter().all(|&v| v >= 0.0) && z[4].abs() <= 2.0);
        }
        let s = SampleSet::from_scalars(&[10.0, 50.0, 90.0]).unwrap();
        let g = DecisionGrid::newsvendor_default(&s).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g.points[400][0], 180.0);
    }
}
