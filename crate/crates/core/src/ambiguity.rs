//! Shape parameters (the sets P_N), their membership predicates, and the
//! trade-off set {(1−θ)P̂ + θQ : Q ∈ P_N}.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteDistribution, SampleSet};
use crate::error::{Result, TroError};
use crate::linalg::Matrix;
use crate::special::student_t_upper_quantile;
use crate::transport::wasserstein1;

pub const DEFAULT_TOL: f64 = 1e-9;
/// Weights below this are treated as zero by the Burg predicate (divergence +∞).
pub const BURG_MIN_WEIGHT: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShapeParameter {
    /// Distributions with the given mean and covariance.
    MeanVariance { mean: Vec<f64>, cov: Matrix },
    /// W₁ ball (ℓ1 ground norm) around the center.
    Wasserstein1 { center: DiscreteDistribution, radius: f64 },
    /// Reweightings p with −(1/N)Σ ln(N pᵢ) ≤ radius.
    BurgDivergence { center: DiscreteDistribution, radius: f64 },
    /// Reweightings p with ‖p − 𝟙/N‖₁ ≤ radius.
    TotalVariation { center: DiscreteDistribution, radius: f64 },
    /// Point masses δ_ξ with |ξ − mean| ≤ halfwidth.
    ConfidenceInterval { mean: f64, halfwidth: f64 },
    /// Point masses on [lo, hi].
    DiracUnion { lo: f64, hi: f64 },
    /// {(1−t)δ_hub + tδ_e : t ∈ [0,1], e ∈ spokes}; star-shaped around δ_hub only.
    TwoPointFamily { hub: Vec<f64>, spokes: Vec<Vec<f64>> },
}

/// The experiment set kinds, independent of their numeric data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetKind {
    MeanVariance,
    Wasserstein,
    Burg,
    TotalVariation,
    ConfidenceInterval,
}

impl SetKind {
    pub fn name(self) -> &'static str {
        match self {
            SetKind::MeanVariance => "mean-variance",
            SetKind::Wasserstein => "wasserstein",
            SetKind::Burg => "burg",
            SetKind::TotalVariation => "total-variation",
            SetKind::ConfidenceInterval => "confidence-interval",
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetKind {
    type Err = TroError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "mean-variance" => SetKind::MeanVariance,
            "wasserstein" => SetKind::Wasserstein,
            "burg" => SetKind::Burg,
            "total-variation" => SetKind::TotalVariation,
            "confidence-interval" => SetKind::ConfidenceInterval,
            other => return Err(TroError::InvalidParameter(format!("unknown set kind '{other}'"))),
        })
    }
}

impl ShapeParameter {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ShapeParameter::MeanVariance { .. } => "mean-variance",
            ShapeParameter::Wasserstein1 { .. } => "wasserstein",
            ShapeParameter::BurgDivergence { .. } => "burg",
            ShapeParameter::TotalVariation { .. } => "total-variation",
            ShapeParameter::ConfidenceInterval { .. } => "confidence-interval",
            ShapeParameter::DiracUnion { .. } => "dirac-union",
            ShapeParameter::TwoPointFamily { .. } => "two-point-family",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(TroError::InvalidParameter(format!("{what} {v} must be ≥ 0")));
        match self {
            ShapeParameter::Wasserstein1 { radius, .. } if !(*radius >= 0.0) => bad("radius", *radius),
            ShapeParameter::BurgDivergence { center, radius }
            | ShapeParameter::TotalVariation { center, radius } => {
                if !(*radius >= 0.0) {
                    return bad("radius", *radius);
                }
                let n = center.len() as f64;
                if center.weights().iter().any(|w| (w - 1.0 / n).abs() > 1e-12) {
                    return Err(TroError::InvalidParameter(
                        "divergence-ball center must have equal weights".into(),
                    ));
                }
                Ok(())
            }
            ShapeParameter::ConfidenceInterval { halfwidth, .. } if !(*halfwidth >= 0.0) => {
                bad("halfwidth", *halfwidth)
            }
            ShapeParameter::DiracUnion { lo, hi } if !(lo <= hi) => Err(TroError::InvalidParameter(
                format!("interval [{lo}, {hi}] is empty"),
            )),
            ShapeParameter::MeanVariance { mean, cov }
                if cov.len() != mean.len() || cov.iter().any(|r| r.len() != mean.len()) =>
            {
                Err(TroError::InvalidParameter("mean/covariance shape mismatch".into()))
            }
            _ => Ok(()),
        }
    }

    /// The center of distance-based sets.
    pub fn center(&self) -> Option<&DiscreteDistribution> {
        match self {
            ShapeParameter::Wasserstein1 { center, .. }
            | ShapeParameter::BurgDivergence { center, .. }
            | ShapeParameter::TotalVariation { center, .. } => Some(center),
            _ => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            ShapeParameter::Wasserstein1 { radius, .. }
            | ShapeParameter::BurgDivergence { radius, .. }
            | ShapeParameter::TotalVariation { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    /// Copy with the radius replaced (distance-based sets only).
    pub fn with_radius(&self, r: f64) -> Option<Self> {
        let mut s = self.clone();
        match &mut s {
            ShapeParameter::Wasserstein1 { radius, .. }
            | ShapeParameter::BurgDivergence { radius, .. }
            | ShapeParameter::TotalVariation { radius, .. } => *radius = r,
            _ => return None,
        }
        Some(s)
    }
}

/// Weights of `q` viewed as a reweighting of `center`'s atoms, if it is one.
/// Trailing extra atoms are accepted when their weight is within `tol`.
fn as_reweighting(center: &DiscreteDistribution, q: &DiscreteDistribution, tol: f64) -> Option<Vec<f64>> {
    let n = center.len();
    if q.len() < n || q.support()[..n] != *center.support() {
        return None;
    }
    if q.weights()[n..].iter().sum::<f64>() > tol {
        return None;
    }
    Some(q.weights()[..n].to_vec())
}

fn incompatible(kind: &'static str, detail: &str) -> TroError {
    TroError::IncompatibleSupport { kind, detail: detail.into() }
}

/// Burg divergence −(1/N)Σ ln(N pᵢ); +∞ when a weight underflows.
pub fn burg_divergence(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    if p.iter().any(|&w| w < BURG_MIN_WEIGHT) {
        return f64::INFINITY;
    }
    -p.iter().map(|&w| (n * w).ln()).sum::<f64>() / n
}

pub fn tv_distance(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    p.iter().map(|&w| (w - 1.0 / n).abs()).sum()
}

/// Membership of `q` in the shape parameter within absolute tolerance `tol`.
pub fn contains(sp: &ShapeParameter, q: &DiscreteDistribution, tol: f64) -> Result<bool> {
    match sp {
        ShapeParameter::MeanVariance { mean, cov } => {
            if q.dim() != mean.len() {
                return Err(incompatible("mean-variance", "dimension mismatch"));
            }
            // moments are compared relative to their magnitude: rounding in a
            // variance of order 10³ alone exceeds an absolute 1e−9
            let close = |a: &f64, b: &f64| (a - b).abs() <= tol * b.abs().max(1.0);
            let m = q.moments();
            let mean_ok = m.mean.iter().zip(mean).all(|(a, b)| close(a, b));
            let cov_ok = m.cov.iter().flatten().zip(cov.iter().flatten()).all(|(a, b)| close(a, b));
            Ok(mean_ok && cov_ok)
        }
        ShapeParameter::Wasserstein1 { center, radius } => {
            if q.dim() != center.dim() {
                return Err(incompatible("wasserstein", "dimension mismatch"));
            }
            Ok(wasserstein1(q, center)? <= radius + tol)
        }
        ShapeParameter::BurgDivergence { center, radius } => {
            let p = as_reweighting(center, q, tol)
                .ok_or_else(|| incompatible("burg", "q must reweight the center's atoms"))?;
            Ok(burg_divergence(&p) <= radius + tol)
        }
        ShapeParameter::TotalVariation { center, radius } => {
            let p = as_reweighting(center, q, tol)
                .ok_or_else(|| incompatible("total-variation", "q must reweight the center's atoms"))?;
            Ok(tv_distance(&p) <= radius + tol)
        }
        ShapeParameter::ConfidenceInterval { mean, halfwidth } => {
            if q.dim() != 1 {
                return Err(incompatible("confidence-interval", "support must be scalar"));
            }
            Ok(q.is_point_mass().is_some_and(|p| (p[0] - mean).abs() <= halfwidth + tol))
        }
        ShapeParameter::DiracUnion { lo, hi } => {
            if q.dim() != 1 {
                return Err(incompatible("dirac-union", "support must be scalar"));
            }
            Ok(q.is_point_mass().is_some_and(|p| p[0] >= lo - tol && p[0] <= hi + tol))
        }
        ShapeParameter::TwoPointFamily { hub, spokes } => {
            if q.dim() != hub.len() {
                return Err(incompatible("two-point-family", "dimension mismatch"));
            }
            let near = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
            let charged: Vec<&Vec<f64>> = q
                .support()
                .iter()
                .zip(q.weights())
                .filter(|(_, &w)| w > tol)
                .map(|(p, _)| p)
                .collect();
            Ok(spokes.iter().any(|e| {
                charged.iter().all(|p| near(p, hub) || near(p, e))
            }))
        }
    }
}

/// The trade-off set {(1−θ)·center + θ·Q : Q ∈ shape}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TroAmbiguity {
    pub shape: ShapeParameter,
    pub theta: f64,
    pub center: DiscreteDistribution,
}

impl TroAmbiguity {
    pub fn new(shape: ShapeParameter, theta: f64, center: DiscreteDistribution) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(TroError::InvalidParameter(format!("theta {theta} outside [0, 1]")));
        }
        shape.validate()?;
        Ok(Self { shape, theta, center })
    }
}

/// Membership in the trade-off set.
///
/// `m` must list the center's atoms first (in order); its weights there are
/// reduced by (1−θ)·center, any further atoms belong wholly to the residual.
/// That is how [`DiscreteDistribution::mixture`] and `blend` lay out mixtures.
pub fn tro_contains(ta: &TroAmbiguity, m: &DiscreteDistribution, tol: f64) -> Result<bool> {
    let c = &ta.center;
    let n = c.len();
    let prefix_ok = m.len() >= n && m.support()[..n] == *c.support();
    let theta = ta.theta;
    if theta == 0.0 {
        if !prefix_ok {
            return Ok(false);
        }
        let diff_ok = m.weights()[..n]
            .iter()
            .zip(c.weights())
            .all(|(a, b)| (a - b).abs() <= tol);
        return Ok(diff_ok && m.weights()[n..].iter().sum::<f64>() <= tol);
    }
    if !prefix_ok {
        return Ok(false);
    }
    let mut q: Vec<f64> = m
        .weights()
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let base = if i < n { (1.0 - theta) * c.weights()[i] } else { 0.0 };
            (w - base) / theta
        })
        .collect();
    if q.iter().any(|&w| w < -tol) {
        return Ok(false);
    }
    for w in q.iter_mut() {
        *w = w.max(0.0);
    }
    let total: f64 = q.iter().sum();
    for w in q.iter_mut() {
        *w /= total;
    }
    let residual = m.reweighted(q)?;
    contains(&ta.shape, &residual, tol)
}

/// Radii and levels for the inventory-study sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Params {
    pub wasserstein_r: f64,
    /// Burg ball radius is `burg_r / N`.
    pub burg_r: f64,
    /// Confidence level of the interval set.
    pub alpha: f64,
    /// Use the Bessel-corrected σ̂ in the interval halfwidth.
    pub bessel_ci: bool,
}

impl Default for Table1Params {
    fn default() -> Self {
        Self { wasserstein_r: 100.0, burg_r: 10.0, alpha: 0.95, bessel_ci: false }
    }
}

/// Radii for the portfolio-study sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table2Params {
    pub wasserstein_r: f64,
    /// Total-variation radius is `min(tv_r / N, 2)`.
    pub tv_r: f64,
}

impl Default for Table2Params {
    fn default() -> Self {
        Self { wasserstein_r: 0.1, tv_r: 100.0 }
    }
}

/// Build one of the inventory-study shape parameters from scalar samples.
pub fn build_table1(samples: &SampleSet, which: SetKind, params: &Table1Params) -> Result<ShapeParameter> {
    if samples.dim() != 1 {
        return Err(TroError::InvalidParameter("newsvendor samples must be scalar".into()));
    }
    let n = samples.len();
    let center = samples.empirical();
    let sp = match which {
        SetKind::MeanVariance => {
            let m = samples.moments(false);
            ShapeParameter::MeanVariance { mean: m.mean, cov: m.cov }
        }
        SetKind::Wasserstein => ShapeParameter::Wasserstein1 { center, radius: params.wasserstein_r },
        SetKind::Burg => ShapeParameter::BurgDivergence { center, radius: params.burg_r / n as f64 },
        SetKind::ConfidenceInterval => {
            if n < 2 {
                return Err(TroError::InvalidParameter(
                    "confidence-interval set needs N ≥ 2".into(),
                ));
            }
            let m = samples.moments(params.bessel_ci);
            let t = student_t_upper_quantile((1.0 - params.alpha) / 2.0, (n - 1) as f64);
            ShapeParameter::ConfidenceInterval {
                mean: m.mean[0],
                halfwidth: t * m.cov[0][0].sqrt() / (n as f64).sqrt(),
            }
        }
        SetKind::TotalVariation => {
            return Err(TroError::UnsupportedSet { kind: "total-variation", problem: "newsvendor" })
        }
    };
    sp.validate()?;
    Ok(sp)
}

/// Build one of the portfolio-study shape parameters.
pub fn build_table2(samples: &SampleSet, which: SetKind, params: &Table2Params) -> Result<ShapeParameter> {
    let n = samples.len();
    let center = samples.empirical();
    let sp = match which {
        SetKind::MeanVariance => {
            let m = samples.moments(false);
            ShapeParameter::MeanVariance { mean: m.mean, cov: m.cov }
        }
        SetKind::Wasserstein => ShapeParameter::Wasserstein1 { center, radius: params.wasserstein_r },
        SetKind::TotalVariation => ShapeParameter::TotalVariation {
            center,
            radius: (params.tv_r / n as f64).min(2.0),
        },
        SetKind::Burg => return Err(TroError::UnsupportedSet { kind: "burg", problem: "portfolio" }),
        SetKind::ConfidenceInterval => {
            return Err(TroError::UnsupportedSet { kind: "confidence-interval", problem: "portfolio" })
        }
    };
    sp.validate()?;
    Ok(sp)
}
