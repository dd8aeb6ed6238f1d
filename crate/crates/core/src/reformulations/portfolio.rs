//! Mean–CVaR portfolio: worst-case expected loss in (x, t), with subgradients
//! for the outer solver.

use super::divergence::{burg_worst_case, tv_dual, tv_greedy};
use super::newsvendor::check_tv;
use super::{InnerSupValue, SupInfo};
use crate::ambiguity::ShapeParameter;
use crate::distributions::SampleSet;
use crate::error::{Result, TroError};
use crate::linalg::{dot, mat_vec, Matrix};
use crate::objective::PortfolioParams;

#[derive(Debug, Clone)]
pub struct PortfolioInstance {
    pub params: PortfolioParams,
    pub shape: ShapeParameter,
    n: usize,
    /// Samples, row-major N×n.
    xi: Vec<f64>,
    /// Center atoms of distance sets, row-major; empty otherwise.
    atoms: Vec<f64>,
    pub cross_check: bool,
}

/// Value and subgradient (∂x₁…∂xₙ, ∂t).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueGrad {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl PortfolioInstance {
    pub fn new(params: PortfolioParams, shape: ShapeParameter, samples: &SampleSet) -> Result<Self> {
        params.validate()?;
        shape.validate()?;
        let n = samples.dim();
        if n != params.n {
            return Err(TroError::InvalidParameter(format!(
                "{} assets in params but samples have {n} columns",
                params.n
            )));
        }
        let flat = |rows: &[Vec<f64>]| rows.iter().flatten().copied().collect::<Vec<f64>>();
        let atoms = match &shape {
            ShapeParameter::ConfidenceInterval { .. } => {
                return Err(TroError::UnsupportedSet { kind: "confidence-interval", problem: "portfolio" })
            }
            ShapeParameter::DiracUnion { .. } => {
                return Err(TroError::UnsupportedSet { kind: "dirac-union", problem: "portfolio" })
            }
            ShapeParameter::MeanVariance { mean, .. } if mean.len() != n => {
                return Err(TroError::IncompatibleSupport { kind: "mean-variance", detail: "dimension mismatch".into() })
            }
            ShapeParameter::TwoPointFamily { hub, spokes } if hub.len() != n || spokes.iter().any(|e| e.len() != n) => {
                return Err(TroError::IncompatibleSupport { kind: "two-point-family", detail: "dimension mismatch".into() })
            }
            other => match other.center() {
                Some(c) if c.dim() != n => {
                    return Err(TroError::IncompatibleSupport { kind: other.kind_name(), detail: "dimension mismatch".into() })
                }
                Some(c) => flat(c.support()),
                None => Vec::new(),
            },
        };
        Ok(Self { params, shape, n, xi: flat(&samples.draws), atoms, cross_check: false })
    }

    pub fn assets(&self) -> usize {
        self.n
    }

    pub fn sample_rows(&self) -> Vec<Vec<f64>> {
        self.xi.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    fn losses(&self, rows: &[f64], x: &[f64]) -> Vec<f64> {
        rows.chunks_exact(self.n).map(|xi| -dot(x, xi)).collect()
    }

    /// Σ wᵢ f(x,t,ξᵢ) and its subgradient for fixed weights (uniform if `None`).
    fn weighted(&self, rows: &[f64], r: &[f64], w: Option<&[f64]>, t: f64, grad: bool) -> ValueGrad {
        let p = &self.params;
        let c = p.cvar_coef();
        let m = r.len();
        let uni = 1.0 / m as f64;
        let mut value = 0.0;
        let mut g = if grad { vec![0.0; self.n + 1] } else { Vec::new() };
        for (i, (&ri, xi)) in r.iter().zip(rows.chunks_exact(self.n)).enumerate() {
            let wi = w.map_or(uni, |w| w[i]);
            if wi == 0.0 {
                continue;
            }
            let excess = ri > t;
            value += wi * p.loss_from_return(t, ri);
            if grad {
                let kx = wi * (p.beta + if excess { c } else { 0.0 });
                for k in 0..self.n {
                    g[k] -= kx * xi[k];
                }
                g[self.n] += wi * ((1.0 - p.beta) - if excess { c } else { 0.0 });
            }
        }
        ValueGrad { value, grad: g }
    }

    /// Portfolio losses −xᵀξ̂ᵢ over the samples.
    pub fn sample_losses(&self, x: &[f64]) -> Vec<f64> {
        self.losses(&self.xi, x)
    }

    pub fn saa(&self, x: &[f64], t: f64, grad: bool) -> ValueGrad {
        let r = self.losses(&self.xi, x);
        self.weighted(&self.xi, &r, None, t, grad)
    }

    fn atom_rows(&self) -> &[f64] {
        if self.atoms.is_empty() {
            &self.xi
        } else {
            &self.atoms
        }
    }

    pub fn inner_sup(&self, x: &[f64], t: f64) -> Result<InnerSupValue> {
        self.inner_sup_grad(x, t, false).map(|(v, _)| v)
    }

    pub fn inner_sup_grad(&self, x: &[f64], t: f64, grad: bool) -> Result<(InnerSupValue, Vec<f64>)> {
        let p = &self.params;
        let c = p.cvar_coef();
        Ok(match &self.shape {
            ShapeParameter::MeanVariance { mean, cov } => {
                let (v, g) = mean_variance(p, mean, cov, x, t, grad);
                (InnerSupValue::closed(v), g)
            }
            ShapeParameter::Wasserstein1 { radius, .. } => {
                let rows = self.atom_rows();
                let r = self.losses(rows, x);
                let base = self.weighted(rows, &r, None, t, grad);
                let (k, xmax) = x
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |(bk, bv), (k, &v)| if v.abs() > bv { (k, v.abs()) } else { (bk, bv) });
                let slope = radius * (p.beta + c);
                let mut g = base.grad;
                if grad {
                    g[k] += slope * x[k].signum();
                }
                (InnerSupValue::closed(base.value + slope * xmax), g)
            }
            ShapeParameter::TotalVariation { radius, .. } => {
                let rows = self.atom_rows();
                let r = self.losses(rows, x);
                let s: Vec<f64> = r.iter().map(|&ri| p.loss_from_return(t, ri)).collect();
                let (value, w) = tv_greedy(&s, *radius);
                if self.cross_check {
                    check_tv(value, tv_dual(&s, *radius), &s)?;
                }
                let g = self.weighted(rows, &r, Some(&w), t, grad).grad;
                (InnerSupValue { value, info: SupInfo::Weights(w) }, g)
            }
            ShapeParameter::BurgDivergence { radius, .. } => {
                let rows = self.atom_rows();
                let r = self.losses(rows, x);
                let s: Vec<f64> = r.iter().map(|&ri| p.loss_from_return(t, ri)).collect();
                let (value, w, lambda, tau) = burg_worst_case(&s, *radius)?;
                let g = self.weighted(rows, &r, Some(&w), t, grad).grad;
                (InnerSupValue { value, info: SupInfo::Dual { lambda, tau } }, g)
            }
            ShapeParameter::TwoPointFamily { hub, spokes } => {
                let mut best = (p.loss(x, t, hub), hub);
                for e in spokes {
                    let v = p.loss(x, t, e);
                    if v > best.0 {
                        best = (v, e);
                    }
                }
                let g = if grad {
                    let r = -dot(x, best.1);
                    self.weighted(best.1, &[r], Some(&[1.0]), t, true).grad
                } else {
                    Vec::new()
                };
                (InnerSupValue::closed(best.0), g)
            }
            ShapeParameter::ConfidenceInterval { .. } | ShapeParameter::DiracUnion { .. } => unreachable!(),
        })
    }

    /// (1−θ)·SAA + θ·sup, with a subgradient when `grad`.
    pub fn tro(&self, theta: f64, x: &[f64], t: f64, grad: bool) -> Result<ValueGrad> {
        let mut value = 0.0;
        let mut g = vec![0.0; if grad { self.n + 1 } else { 0 }];
        if theta < 1.0 {
            let s = self.saa(x, t, grad);
            value += (1.0 - theta) * s.value;
            for (a, b) in g.iter_mut().zip(&s.grad) {
                *a += (1.0 - theta) * b;
            }
        }
        if theta > 0.0 {
            let (s, sg) = self.inner_sup_grad(x, t, grad)?;
            value += theta * s.value;
            for (a, b) in g.iter_mut().zip(&sg) {
                *a += theta * b;
            }
        }
        Ok(ValueGrad { value, grad: g })
    }

    pub fn tro_objective(&self, theta: f64, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.tro(theta, x, t, false)?.value)
    }
}

fn mean_variance(p: &PortfolioParams, mean: &[f64], cov: &Matrix, x: &[f64], t: f64, grad: bool) -> (f64, Vec<f64>) {
    let c = p.cvar_coef();
    let mu = dot(x, mean);
    let sx = mat_vec(cov, x);
    let q = dot(x, &sx).max(0.0);
    let a = -mu - t;
    let root = (q + a * a).sqrt();
    let value = (1.0 - p.beta) * t - p.beta * mu + c * 0.5 * (a + root);
    if !grad {
        return (value, Vec::new());
    }
    let n = x.len();
    let mut g = vec![0.0; n + 1];
    // at the cusp root = 0 the zero element is used for the root term
    let (gq, ga) = if root > 0.0 { (1.0 / root, a / root) } else { (0.0, 0.0) };
    for k in 0..n {
        g[k] = -p.beta * mean[k] + 0.5 * c * (-mean[k] + gq * sx[k] - ga * mean[k]);
    }
    g[n] = (1.0 - p.beta) - 0.5 * c * (1.0 + ga);
    (value, g)
}

fn check_decision(p: &PortfolioParams, x: &[f64], t: f64) -> Result<()> {
    let sum: f64 = x.iter().sum();
    if x.len() != p.n || x.iter().any(|&v| v < -1e-9) || (sum - 1.0).abs() > 1e-9 || t.abs() > p.t_bound {
        return Err(TroError::InvalidParameter(format!("infeasible portfolio decision x={x:?}, t={t}")));
    }
    Ok(())
}

/// sup_{P ∈ P_N} E_P[f(x, t, ξ)]; total-variation values are cross-checked
/// against the LP dual.
pub fn pf_inner_sup(
    sp: &ShapeParameter,
    x: &[f64],
    t: f64,
    params: &PortfolioParams,
    samples: &SampleSet,
) -> Result<InnerSupValue> {
    check_decision(params, x, t)?;
    let mut inst = PortfolioInstance::new(*params, sp.clone(), samples)?;
    inst.cross_check = true;
    inst.inner_sup(x, t)
}

/// (1/N) Σ f(x, t, ξ̂ᵢ).
pub fn pf_saa(params: &PortfolioParams, x: &[f64], t: f64, samples: &SampleSet) -> f64 {
    samples.draws.iter().map(|xi| params.loss(x, t, xi)).sum::<f64>() / samples.len() as f64
}

pub fn pf_tro_objective(
    params: &PortfolioParams,
    sp: &ShapeParameter,
    theta: f64,
    x: &[f64],
    t: f64,
    samples: &SampleSet,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(TroError::InvalidParameter(format!("theta {theta}")));
    }
    check_decision(params, x, t)?;
    PortfolioInstance::new(*params, sp.clone(), samples)?.tro_objective(theta, x, t)
}

/// Lipschitz modulus of f(·, ξ) in (x, t) under ‖·‖₁:
/// (1−β)(1 + 1/(1−α)) + ((1−αβ)/(1−α))‖ξ‖₁.
pub fn lipschitz_kappa(params: &PortfolioParams, xi: &[f64]) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let norm: f64 = xi.iter().map(|v| v.abs()).sum();
    (1.0 - b) * (1.0 + 1.0 / (1.0 - a)) + (1.0 - a * b) / (1.0 - a) * norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, GroundTruth};

    fn setup(n: usize) -> (PortfolioParams, SampleSet) {
        let s = sample(&GroundTruth::portfolio_default(), n, 4).unwrap();
        (PortfolioParams::for_samples(&s), s)
    }

    #[test]
    fn tv_zero_radius_is_saa() {
        let (p, s) = setup(8);
        let sp = ShapeParameter::TotalVariation { center: s.empirical(), radius: 0.0 };
        let x = [0.25; 4];
        let v = pf_inner_sup(&sp, &x, 0.05, &p, &s).unwrap().value;
        assert!((v - pf_saa(&p, &x, 0.05, &s)).abs() < 1e-14);
    }

    #[test]
    fn wasserstein_penalty_at_a_vertex() {
        let (p, s) = setup(6);
        let r = 0.1;
        let sp = ShapeParameter::Wasserstein1 { center: s.empirical(), radius: r };
        let x = [1.0, 0.0, 0.0, 0.0];
        let v = pf_inner_sup(&sp, &x, 0.0, &p, &s).unwrap().value;
        let expect = pf_saa(&p, &x, 0.0, &s) + r * (p.beta + p.cvar_coef());
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn kappa_values() {
        let p = PortfolioParams::new(0.5, 0.95, 4, 1.0).unwrap();
        assert!((lipschitz_kappa(&p, &[0.0; 4]) - 10.5).abs() < 1e-12);
    }

    #[test]
    fn theta_endpoints_interpolate() {
        let (p, s) = setup(10);
        let sp = ShapeParameter::TotalVariation { center: s.empirical(), radius: 0.6 };
        let x = [0.1, 0.2, 0.3, 0.4];
        let t = 0.02;
        let v0 = pf_tro_objective(&p, &sp, 0.0, &x, t, &s).unwrap();
        let v1 = pf_tro_objective(&p, &sp, 1.0, &x, t, &s).unwrap();
        assert!((v0 - pf_saa(&p, &x, t, &s)).abs() < 1e-14);
        let v = pf_tro_objective(&p, &sp, 0.37, &x, t, &s).unwrap();
        assert!((v - (0.63 * v0 + 0.37 * v1)).abs() < 1e-10);
    }

    #[test]
    fn subgradients_match_finite_differences_off_kinks() {
        let (p, s) = setup(12);
        let m = s.moments(false);
        let shapes = [
            ShapeParameter::MeanVariance { mean: m.mean, cov: m.cov },
            ShapeParameter::Wasserstein1 { center: s.empirical(), radius: 0.1 },
            ShapeParameter::TotalVariation { center: s.empirical(), radius: 0.5 },
            ShapeParameter::BurgDivergence { center: s.empirical(), radius: 0.3 },
        ];
        let x = [0.15, 0.35, 0.3, 0.2];
        let t = 0.013;
        for sp in shapes {
            let inst = PortfolioInstance::new(p, sp.clone(), &s).unwrap();
            let vg = inst.tro(0.6, &x, t, true).unwrap();
            let h = 1e-7;
            for k in 0..5 {
                let (mut xp, mut tp) = (x, t);
                if k < 4 { xp[k] += h } else { tp += h }
                let up = inst.tro(0.6, &xp, tp, false).unwrap().value;
                let (mut xm, mut tm) = (x, t);
                if k < 4 { xm[k] -= h } else { tm -= h }
                let dn = inst.tro(0.6, &xm, tm, false).unwrap().value;
                let fd = (up - dn) / (2.0 * h);
                assert!((fd - vg.grad[k]).abs() < 1e-4, "{} k={k}: fd {fd} vs {}", sp.kind_name(), vg.grad[k]);
            }
        }
    }
}
