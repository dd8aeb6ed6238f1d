use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ambiguity::{burg_divergence, contains, tv_distance, ShapeParameter, DEFAULT_TOL};
use crate::distributions::DiscreteDistribution;
use crate::error::{Result, TroError};
use crate::linalg::{cholesky_psd, mat_vec};
use crate::rng::{rng_from_seed, TroRng};
use crate::transport::l1;

/// A finite collection of members of an ambiguity set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionPanel {
    pub members: Vec<DiscreteDistribution>,
    pub seed: u64,
    pub count: usize,
    pub strategy: String,
}

impl DistributionPanel {
    /// Wrap hand-picked members (no membership check).
    pub fn from_members(members: Vec<DiscreteDistribution>, strategy: impl Into<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(TroError::InvalidParameter("panel is empty".into()));
        }
        Ok(Self { count: members.len(), members, seed: 0, strategy: strategy.into() })
    }

    /// Draw `count` members of `sp`; every member is verified with [`is_member`].
    pub fn generate(sp: &ShapeParameter, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(TroError::InvalidParameter("panel count must be ≥ 1".into()));
        }
        sp.validate()?;
        let mut rng = rng_from_seed(seed);
        let (members, strategy) = match sp {
            ShapeParameter::BurgDivergence { center, radius } => (
                (0..count)
                    .map(|k| reweight_member(center, *radius, burg_divergence, k, &mut rng))
                    .collect::<Result<Vec<_>>>()?,
                "dirichlet reweighting, boundary/interior",
            ),
            ShapeParameter::TotalVariation { center, radius } => (
                (0..count)
                    .map(|k| reweight_member(center, *radius, tv_distance, k, &mut rng))
                    .collect::<Result<Vec<_>>>()?,
                "dirichlet reweighting, boundary/interior",
            ),
            ShapeParameter::Wasserstein1 { center, radius } => (
                (0..count)
                    .map(|k| transport_member(center, *radius, k, &mut rng))
                    .collect::<Result<Vec<_>>>()?,
                "atom transport perturbations",
            ),
            ShapeParameter::MeanVariance { mean, cov } => (
                (0..count)
                    .map(|k| moment_member(mean, cov, k, &mut rng))
                    .collect::<Result<Vec<_>>>()?,
                "moment-matched two/three-point constructions",
            ),
            ShapeParameter::ConfidenceInterval { mean, halfwidth } => (
                interval_points(mean - halfwidth, mean + halfwidth, count, &mut rng),
                "point masses in the interval",
            ),
            ShapeParameter::DiracUnion { lo, hi } => {
                (interval_points(*lo, *hi, count, &mut rng), "point masses in the interval")
            }
            ShapeParameter::TwoPointFamily { hub, spokes } => (
                (0..count)
                    .map(|_| {
                        let e = &spokes[rng.random_range(0..spokes.len())];
                        let t: f64 = rng.random();
                        DiscreteDistribution::new(vec![hub.clone(), e.clone()], vec![1.0 - t, t])
                    })
                    .collect::<Result<Vec<_>>>()?,
                "hub/spoke two-point mixtures",
            ),
        };
        for (i, m) in members.iter().enumerate() {
            if !is_member(sp, m)? {
                return Err(TroError::InvalidDistribution(format!("panel member {i} left the set")));
            }
        }
        Ok(Self { members, seed, count, strategy: strategy.into() })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `contains` at the default tolerance. Wasserstein supports too large for
/// the transport LP fall back to the atom-by-atom coupling, whose cost bounds
/// W₁ from above, so a `true` is still a certificate.
pub fn is_member(sp: &ShapeParameter, q: &DiscreteDistribution) -> Result<bool> {
    match contains(sp, q, DEFAULT_TOL) {
        Err(TroError::TooLarge(_)) => match sp {
            ShapeParameter::Wasserstein1 { center, radius } => {
                Ok(identity_coupling_cost(center, q).is_some_and(|c| c <= radius + DEFAULT_TOL))
            }
            _ => unreachable!("only transport distances refuse large supports"),
        },
        other => other,
    }
}

/// Σᵢ wᵢ‖aᵢ − bᵢ‖₁ when both laws put the same weights on paired atoms.
fn identity_coupling_cost(a: &DiscreteDistribution, b: &DiscreteDistribution) -> Option<f64> {
    (a.len() == b.len() && a.weights() == b.weights()).then(|| {
        a.support()
            .iter()
            .zip(b.support())
            .zip(a.weights())
            .map(|((p, q), w)| w * l1(p, q))
            .sum()
    })
}

fn dirichlet(n: usize, concentration: f64, rng: &mut TroRng) -> Vec<f64> {
    let g = Gamma::new(concentration, 1.0).expect("positive shape");
    loop {
        let v: Vec<f64> = (0..n).map(|_| g.sample(rng)).collect();
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Walk from the center's weights toward a Dirichlet draw and stop on the
/// ball boundary (even `k`) or at a uniform fraction of it (odd `k`).
fn reweight_member(
    center: &DiscreteDistribution,
    radius: f64,
    div: fn(&[f64]) -> f64,
    k: usize,
    rng: &mut TroRng,
) -> Result<DiscreteDistribution> {
    let n = center.len();
    let w0 = center.weights();
    // sharp draws land near the simplex vertices, flat ones near the center
    let conc = [1.0, 0.1, 5.0][(k / 2) % 3];
    let dir = dirichlet(n, conc, rng);
    let at = |a: f64| -> Vec<f64> { w0.iter().zip(&dir).map(|(p, q)| (1.0 - a) * p + a * q).collect() };
    let mut a_max = 1.0;
    if div(&at(1.0)) > radius {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if div(&at(mid)) <= radius {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        a_max = lo;
    }
    let a = if k % 2 == 0 { a_max } else { a_max * rng.random::<f64>() };
    let mut w = at(a);
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    center.reweighted(w)
}

/// Shift every atom along a direction with ℓ₁ norm one; the magnitudes are
/// Dirichlet-distributed and scaled so the identity coupling costs exactly
/// `radius` (even `k`) or a uniform fraction of it. Members with `k % 4 < 2`
/// move all atoms along one common direction.
fn transport_member(
    center: &DiscreteDistribution,
    radius: f64,
    k: usize,
    rng: &mut TroRng,
) -> Result<DiscreteDistribution> {
    let n = center.len();
    let d = center.dim();
    let unit = |rng: &mut TroRng| -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let s: f64 = v.iter().map(|x| x.abs()).sum();
        v.into_iter().map(|x| x / s).collect()
    };
    let common = unit(rng);
    let mags = dirichlet(n, 1.0, rng);
    let level = if k % 2 == 0 { 1.0 } else { rng.random::<f64>() };
    let w = center.weights();
    let wm: f64 = mags.iter().zip(w).map(|(m, w)| m * w).sum();
    let scale = radius * level * (1.0 - 1e-12) / wm;
    let support = center
        .support()
        .iter()
        .zip(&mags)
        .map(|(a, &m)| {
            let dir = if k % 4 < 2 { common.clone() } else { unit(rng) };
            a.iter().zip(&dir).map(|(x, u)| x + scale * m * u).collect()
        })
        .collect();
    DiscreteDistribution::new(support, w.to_vec())
}

/// Laws with mean `mean` and covariance `cov` exactly.
///
/// Scalar, even `k`: two points with a random split p. Otherwise 2n+1 atoms
/// μ ± L·Qeⱼ/√(2w) (weight w each) plus μ (weight 1 − 2nw), Q a random
/// rotation; w = 1/(2n) drops the central atom.
fn moment_member(mean: &[f64], cov: &[Vec<f64>], k: usize, rng: &mut TroRng) -> Result<DiscreteDistribution> {
    let n = mean.len();
    if n == 1 && k % 2 == 0 {
        let (m, s) = (mean[0], cov[0][0].sqrt());
        let p: f64 = rng.random_range(0.05..0.95);
        let a = m - s * ((1.0 - p) / p).sqrt();
        let b = m + s * (p / (1.0 - p)).sqrt();
        return DiscreteDistribution::from_scalars(&[a, b], vec![p, 1.0 - p]);
    }
    let l = cholesky_psd(&cov.to_vec())?;
    let q = random_rotation(n, rng);
    let w = if k % 3 == 0 { 0.5 / n as f64 } else { rng.random_range(0.02..1.0) * 0.5 / n as f64 };
    let mut support = Vec::with_capacity(2 * n + 1);
    let mut weights = Vec::with_capacity(2 * n + 1);
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| q[i][j]).collect();
        let v = mat_vec(&l, &col);
        for sign in [-1.0, 1.0] {
            support.push(mean.iter().zip(&v).map(|(m, x)| m + sign * x / (2.0 * w).sqrt()).collect());
            weights.push(w);
        }
    }
    let rest = 1.0 - 2.0 * n as f64 * w;
    if rest > 1e-12 {
        support.push(mean.to_vec());
        weights.push(rest);
    }
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|v| *v /= s);
    DiscreteDistribution::new(support, weights)
}

/// Orthonormal columns by Gram–Schmidt on a Gaussian matrix.
fn random_rotation(n: usize, rng: &mut TroRng) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for c in &cols {
            let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// Point masses at both ends and at uniform interior points.
fn interval_points(lo: f64, hi: f64, count: usize, rng: &mut TroRng) -> Vec<DiscreteDistribution> {
    (0..count)
        .map(|k| {
            let v = match k {
                0 => lo,
                1 => hi,
                _ => lo + (hi - lo) * rng.random::<f64>(),
            };
            DiscreteDistribution::point_mass(vec![v])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{moments, sample, GroundTruth};

    fn center(n: usize) -> DiscreteDistribution {
        sample(&GroundTruth::newsvendor_default(), n, 3).unwrap().empirical()
    }

    #[test]
    fn divergence_panels_reach_the_boundary() {
        let c = center(20);
        let sp = ShapeParameter::TotalVariation { center: c.clone(), radius: 0.3 };
        let p = DistributionPanel::generate(&sp, 12, 1).unwrap();
        let d0 = tv_distance(p.members[0].weights());
        assert!((d0 - 0.3).abs() < 1e-9, "{d0}");
        let sp = ShapeParameter::BurgDivergence { center: c, radius: 0.5 };
        let p = DistributionPanel::generate(&sp, 12, 1).unwrap();
        assert!((burg_divergence(p.members[0].weights()) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn moment_panels_match_moments() {
        let sp = ShapeParameter::MeanVariance { mean: vec![50.0], cov: vec![vec![2500.0]] };
        let p = DistributionPanel::generate(&sp, 10, 2).unwrap();
        assert_eq!(p.len(), 10);
        let GroundTruth::MultivariateNormal { mean, cov } = GroundTruth::portfolio_default() else { unreachable!() };
        let sp = ShapeParameter::MeanVariance { mean: mean.clone(), cov: cov.clone() };
        let p = DistributionPanel::generate(&sp, 6, 2).unwrap();
        let m = moments(&p.members[1], false);
        assert!((m.cov[2][3] - cov[2][3]).abs() < 1e-12);
    }

    #[test]
    fn large_transport_panels_use_the_coupling_certificate() {
        let s = sample(&GroundTruth::portfolio_default(), 100, 5).unwrap();
        let sp = ShapeParameter::Wasserstein1 { center: s.empirical(), radius: 0.1 };
        let p = DistributionPanel::generate(&sp, 4, 9).unwrap();
        let cost = identity_coupling_cost(&s.empirical(), &p.members[0]).unwrap();
        assert!((cost - 0.1).abs() < 1e-9);
    }
}
