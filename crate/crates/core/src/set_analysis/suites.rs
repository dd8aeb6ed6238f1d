//! Membership suites for star-shapedness and the θ-hierarchy, the two-point
//! counterexample, and the Hausdorff convergence trend of total-variation
//! balls.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::checks::CheckReport;
use super::{hausdorff, is_member, DecisionGrid, DistributionPanel};
use crate::ambiguity::{contains, tro_contains, tv_distance, ShapeParameter, TroAmbiguity, DEFAULT_TOL};
use crate::distributions::DiscreteDistribution;
use crate::error::{Result, TroError};
use crate::objective::NewsvendorParams;
use crate::rng::rng_from_seed;

/// {0, 0.1, …, 1}.
pub fn alpha_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Counts pairs (member q, α) with (1−α)·center + α·q outside the set.
pub fn star_center_suite(
    sp: &ShapeParameter,
    center: &DiscreteDistribution,
    panel: &DistributionPanel,
    alphas: &[f64],
) -> Result<CheckReport> {
    let mut misses = 0usize;
    for q in &panel.members {
        for &a in alphas {
            let m = center.blend(a, q)?;
            if !contains(sp, &m, DEFAULT_TOL)? {
                misses += 1;
            }
        }
    }
    Ok(CheckReport::new(
        "star-center",
        misses as f64,
        0.0,
        format!("{} members × {} α", panel.len(), alphas.len()),
    ))
}

/// For every member q and θ₁ in `thetas`, M = (1−θ₁)·center + θ₁·q lies in the
/// θ₁ trade-off set; counts θ₂ ≥ θ₁ whose set misses M.
pub fn hierarchy_suite(
    sp: &ShapeParameter,
    center: &DiscreteDistribution,
    panel: &DistributionPanel,
    thetas: &[f64],
) -> Result<CheckReport> {
    let sets: Vec<TroAmbiguity> = thetas
        .iter()
        .map(|&t| TroAmbiguity::new(sp.clone(), t, center.clone()))
        .collect::<Result<_>>()?;
    let mut misses = 0usize;
    let mut tested = 0usize;
    for q in &panel.members {
        for (i, &t1) in thetas.iter().enumerate() {
            let m = center.blend(t1, q)?;
            if !tro_contains(&sets[i], &m, DEFAULT_TOL)? {
                misses += 1;
                continue;
            }
            for (j, &t2) in thetas.iter().enumerate() {
                if t2 >= t1 && j != i {
                    tested += 1;
                    if !tro_contains(&sets[j], &m, DEFAULT_TOL)? {
                        misses += 1;
                    }
                }
            }
        }
    }
    Ok(CheckReport::new("hierarchy", misses as f64, 0.0, format!("{tested} (θ₁, θ₂) pairs")))
}

/// The two-point family around δ₁ with spokes {0, 2} and center δ₀:
/// M = (1−θ₁)δ₀ + θ₁(½δ₁ + ½δ₂) is in the θ₁ set but not in the θ₂ set.
/// Passes when at least one such violation is found (the set family is not
/// nested).
pub fn two_point_check(thetas: &[f64]) -> Result<CheckReport> {
    let hat = DiscreteDistribution::point_mass(vec![0.0]);
    let shape = ShapeParameter::TwoPointFamily { hub: vec![1.0], spokes: vec![vec![0.0], vec![2.0]] };
    let half = DiscreteDistribution::from_scalars(&[1.0, 2.0], vec![0.5, 0.5])?;
    let mut violations = 0usize;
    let mut pairs = 0usize;
    for &t1 in thetas.iter().filter(|&&t| t > 0.0) {
        let m = hat.mixture(t1, &half)?;
        if !tro_contains(&TroAmbiguity::new(shape.clone(), t1, hat.clone())?, &m, DEFAULT_TOL)? {
            return Err(TroError::InvalidDistribution(format!("M not in its own θ₁={t1} set")));
        }
        for &t2 in thetas.iter().filter(|&&t| t > t1) {
            pairs += 1;
            if !tro_contains(&TroAmbiguity::new(shape.clone(), t2, hat.clone())?, &m, DEFAULT_TOL)? {
                violations += 1;
            }
        }
    }
    // pass ⇔ observed ≤ bound, so report the negated count
    Ok(CheckReport::new(
        "two-point-non-hierarchy",
        -(violations as f64),
        -1.0,
        format!("{violations} of {pairs} (θ₁ < θ₂) pairs violate nesting"),
    ))
}

/// Whether the sample distribution belongs to the set (a star center candidate).
pub fn contains_center(sp: &ShapeParameter, center: &DiscreteDistribution) -> Result<bool> {
    is_member(sp, center)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffTrend {
    pub sizes: Vec<usize>,
    /// Mean over seeds of ℍ(panel around P̂_N, panel around the truth).
    pub distances: Vec<f64>,
    pub seeds: usize,
    pub decreasing: bool,
}

/// Panel of a total-variation ball: exponential tilts wᵢ·exp(κ zᵢ) of the
/// center, z = (ξ − loc)/scale, pulled back toward the center until inside.
/// The same κ's applied to converging centers give converging members, so
/// the panels track the sets themselves.
pub fn tilted_tv_panel(
    center: &DiscreteDistribution,
    radius: f64,
    kappas: &[f64],
    loc: f64,
    scale: f64,
) -> Result<DistributionPanel> {
    let w0 = center.weights();
    let members = kappas
        .iter()
        .map(|&k| {
            let raw: Vec<f64> = center
                .scalars()
                .iter()
                .zip(w0)
                .map(|(x, w)| w * (k * (x - loc) / scale).exp())
                .collect();
            let s: f64 = raw.iter().sum();
            let tilt: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let d = tv_distance(&tilt);
            let a = if d > radius { radius / d } else { 1.0 };
            let w: Vec<f64> = w0.iter().zip(&tilt).map(|(p, q)| (1.0 - a) * p + a * q).collect();
            let s: f64 = w.iter().sum();
            center.reweighted(w.into_iter().map(|v| v / s).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    DistributionPanel::from_members(members, format!("exponential tilts κ∈{kappas:?}"))
}

/// Hausdorff distance between total-variation balls of fixed `radius` around
/// P̂_N and around a discrete truth (`atoms` exponential(50) quantiles,
/// uniform), for each N in `sizes`. Sample sets are nested across N within a
/// seed, so every N sees the same draws.
pub fn tv_hausdorff_trend(
    sizes: &[usize],
    radius: f64,
    atoms: usize,
    seeds: usize,
    base_seed: u64,
) -> Result<HausdorffTrend> {
    let nmax = *sizes.iter().max().ok_or_else(|| TroError::InvalidParameter("no sample sizes".into()))?;
    let mean = 50.0;
    let support: Vec<f64> = (0..atoms).map(|k| -mean * (1.0 - (k as f64 + 0.5) / atoms as f64).ln()).collect();
    let truth = DiscreteDistribution::from_scalars(&support, vec![1.0 / atoms as f64; atoms])?;
    let kappas: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
    let truth_panel = tilted_tv_panel(&truth, radius, &kappas, mean, mean)?;
    let hi = 2.0 * support[atoms - 1];
    let grid = DecisionGrid::new((0..401).map(|i| vec![hi * i as f64 / 400.0]).collect(), format!("401 on [0, {hi}]"))?;
    let f = NewsvendorParams::default();
    let mut distances = vec![0.0; sizes.len()];
    for s in 0..seeds {
        let mut rng = rng_from_seed(base_seed.wrapping_add(s as u64));
        let draws: Vec<f64> = (0..nmax).map(|_| support[rng.random_range(0..atoms)]).collect();
        for (slot, &n) in distances.iter_mut().zip(sizes) {
            let hat = DiscreteDistribution::from_scalars(&draws[..n], vec![1.0 / n as f64; n])?;
            let panel = tilted_tv_panel(&hat, radius, &kappas, mean, mean)?;
            *slot += hausdorff(&panel, &truth_panel, &grid, &f) / seeds as f64;
        }
    }
    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    Ok(HausdorffTrend { sizes: sizes.to_vec(), distances, seeds, decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::{build_table1, SetKind, Table1Params};
    use crate::distributions::{sample, GroundTruth};
    use crate::solvers::theta_grid;

    #[test]
    fn two_point_family_is_not_nested() {
        let r = two_point_check(&theta_grid(4)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn burg_ball_is_star_shaped_and_nested() {
        let s = sample(&GroundTruth::newsvendor_default(), 8, 11).unwrap();
        let sp = build_table1(&s, SetKind::Burg, &Table1Params::default()).unwrap();
        let c = s.empirical();
        let panel = DistributionPanel::generate(&sp, 6, 2).unwrap();
        assert!(star_center_suite(&sp, &c, &panel, &alpha_grid()).unwrap().pass);
        assert!(hierarchy_suite(&sp, &c, &panel, &theta_grid(5)).unwrap().pass);
    }

    #[test]
    fn interval_set_lacks_the_sample_center() {
        let s = sample(&GroundTruth::newsvendor_default(), 8, 11).unwrap();
        let sp = build_table1(&s, SetKind::ConfidenceInterval, &Table1Params::default()).unwrap();
        assert!(!contains_center(&sp, &s.empirical()).unwrap());
    }

    #[test]
    fn tilted_panels_stay_in_the_ball() {
        let s = sample(&GroundTruth::newsvendor_default(), 30, 1).unwrap();
        let c = s.empirical();
        let p = tilted_tv_panel(&c, 0.2, &[-2.0, 0.0, 2.0], 50.0, 50.0).unwrap();
        for m in &p.members {
            assert!(tv_distance(m.weights()) <= 0.2 + 1e-12);
        }
        assert!(tv_distance(p.members[1].weights()) < 1e-12);
    }
}
