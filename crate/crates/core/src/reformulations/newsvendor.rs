//! Inventory problem: worst-case expected shortfall (ξ−x)₊ − ξ.

use super::divergence::{burg_worst_case, tv_dual, tv_greedy};
use super::{scarf_excess, InnerSupValue, SupInfo, TV_CHECK_TOL};
use crate::ambiguity::ShapeParameter;
use crate::distributions::SampleSet;
use crate::error::{Result, TroError};
use crate::objective::{shortfall, NewsvendorParams};

/// A newsvendor TRO instance with the sample data unpacked for fast evaluation.
#[derive(Debug, Clone)]
pub struct NewsvendorInstance {
    pub params: NewsvendorParams,
    pub shape: ShapeParameter,
    /// Samples defining the SAA term.
    pub xi: Vec<f64>,
    /// Atoms of the shape's center (the samples when it has none).
    atoms: Vec<f64>,
    /// Whether `tv_greedy` results are re-checked against the LP dual.
    pub cross_check: bool,
}

impl NewsvendorInstance {
    pub fn new(params: NewsvendorParams, shape: ShapeParameter, samples: &SampleSet) -> Result<Self> {
        params.validate()?;
        shape.validate()?;
        if samples.dim() != 1 {
            return Err(TroError::InvalidParameter("newsvendor samples must be scalar".into()));
        }
        let xi = samples.scalars();
        let atoms = match shape.center() {
            Some(c) if c.dim() != 1 => {
                return Err(TroError::IncompatibleSupport { kind: shape.kind_name(), detail: "center must be scalar".into() })
            }
            Some(c) => c.scalars(),
            None => xi.clone(),
        };
        match &shape {
            ShapeParameter::MeanVariance { mean, .. } if mean.len() != 1 => {
                return Err(TroError::IncompatibleSupport { kind: "mean-variance", detail: "moments must be scalar".into() })
            }
            ShapeParameter::TwoPointFamily { hub, .. } if hub.len() != 1 => {
                return Err(TroError::IncompatibleSupport { kind: "two-point-family", detail: "atoms must be scalar".into() })
            }
            _ => {}
        }
        Ok(Self { params, shape, xi, atoms, cross_check: false })
    }

    /// (1/N) Σ [(ξ̂ᵢ − x)₊ − ξ̂ᵢ].
    pub fn saa(&self, x: f64) -> f64 {
        mean_shortfall(x, &self.xi)
    }

    pub fn inner_sup(&self, x: f64) -> Result<InnerSupValue> {
        Ok(match &self.shape {
            ShapeParameter::MeanVariance { mean, cov } => {
                InnerSupValue::closed(scarf_excess(x, mean[0], cov[0][0]) - mean[0])
            }
            ShapeParameter::Wasserstein1 { radius, .. } => {
                InnerSupValue::closed(radius + mean_shortfall(x, &self.atoms))
            }
            ShapeParameter::BurgDivergence { radius, .. } => {
                let s: Vec<f64> = self.atoms.iter().map(|&v| shortfall(x, v)).collect();
                let (value, _, lambda, tau) = burg_worst_case(&s, *radius)?;
                InnerSupValue { value, info: SupInfo::Dual { lambda, tau } }
            }
            ShapeParameter::TotalVariation { radius, .. } => {
                let s: Vec<f64> = self.atoms.iter().map(|&v| shortfall(x, v)).collect();
                let (value, w) = tv_greedy(&s, *radius);
                if self.cross_check {
                    check_tv(value, tv_dual(&s, *radius), &s)?;
                }
                InnerSupValue { value, info: SupInfo::Weights(w) }
            }
            ShapeParameter::ConfidenceInterval { mean, halfwidth } => {
                InnerSupValue::closed((-x).max(-mean + halfwidth))
            }
            ShapeParameter::DiracUnion { lo, hi } => {
                InnerSupValue::closed(dirac_union(*lo, *hi, x, &self.xi))
            }
            ShapeParameter::TwoPointFamily { hub, spokes } => {
                let h = shortfall(x, hub[0]);
                let v = spokes.iter().map(|e| shortfall(x, e[0])).fold(h, f64::max);
                InnerSupValue::closed(v)
            }
        })
    }

    /// (c−h)x + (p−h){(1−θ)·SAA + θ·sup}.
    pub fn tro_objective(&self, theta: f64, x: f64) -> Result<f64> {
        let p = &self.params;
        let saa = if theta < 1.0 { self.saa(x) } else { 0.0 };
        let sup = if theta > 0.0 { self.inner_sup(x)?.value } else { 0.0 };
        Ok((p.c - p.h) * x + (p.p - p.h) * ((1.0 - theta) * saa + theta * sup))
    }
}

pub(crate) fn check_tv(greedy: f64, dual: f64, s: &[f64]) -> Result<()> {
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if (greedy - dual).abs() > TV_CHECK_TOL * scale {
        return Err(TroError::TvInconsistency { greedy, dual });
    }
    Ok(())
}

fn mean_shortfall(x: f64, xi: &[f64]) -> f64 {
    xi.iter().map(|&v| shortfall(x, v)).sum::<f64>() / xi.len() as f64
}

fn dirac_union(lo: f64, hi: f64, x: f64, xi: &[f64]) -> f64 {
    // (ξ−x)₊ − ξ = max(−x, −ξ) is non-increasing in ξ: the worst Dirac sits at lo
    debug_assert!(lo <= hi);
    mean_shortfall(x, xi).max(shortfall(x, lo))
}

/// sup_{P ∈ P_N} E_P[(ξ−x)₊ − ξ] for the given shape parameter.
pub fn nv_inner_sup(sp: &ShapeParameter, x: f64, samples: &SampleSet) -> Result<InnerSupValue> {
    let mut inst = NewsvendorInstance::new(NewsvendorParams::default(), sp.clone(), samples)?;
    inst.cross_check = true;
    inst.inner_sup(x)
}

/// SAA shortfall (1/N) Σ [(ξ̂ᵢ − x)₊ − ξ̂ᵢ].
pub fn nv_saa(x: f64, samples: &SampleSet) -> f64 {
    mean_shortfall(x, &samples.scalars())
}

pub fn nv_tro_objective(
    params: &NewsvendorParams,
    sp: &ShapeParameter,
    theta: f64,
    x: f64,
    samples: &SampleSet,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) || !(x >= 0.0) {
        return Err(TroError::InvalidParameter(format!("theta {theta}, x {x}")));
    }
    NewsvendorInstance::new(*params, sp.clone(), samples)?.tro_objective(theta, x)
}

/// Worst case over conv(P̂_N ∪ {δ_ξ : ξ ∈ [lo, hi]}): the larger of the SAA
/// value and the worst Dirac value.
pub fn nv_dirac_union_sup(lo: f64, hi: f64, x: f64, samples: &SampleSet) -> Result<f64> {
    if !(lo <= hi) {
        return Err(TroError::InvalidParameter(format!("interval [{lo}, {hi}] is empty")));
    }
    Ok(dirac_union(lo, hi, x, &samples.scalars()))
}
