//! Brute-force set geometry on finite grids and panels: the pseudometric
//! 𝕕(P₁, P₂) = sup_x |E_P₁ f(x,·) − E_P₂ f(x,·)|, Hausdorff distances between
//! panels, the constant C_N, and property checks on θ-sweeps.

pub mod checks;
pub mod grid;
pub mod panel;
pub mod suites;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DiscreteDistribution;
use crate::objective::ObjectiveFamily;
use crate::solvers::TroProblem;

pub use checks::{check_concavity, check_lipschitz, check_monotone, CheckReport};
pub use grid::DecisionGrid;
pub use panel::{is_member, DistributionPanel};

/// E_d f(x, ·) at every grid point.
pub fn expectation_profile(d: &DiscreteDistribution, grid: &DecisionGrid, f: &dyn ObjectiveFamily) -> Vec<f64> {
    grid.points
        .par_iter()
        .map(|x| d.expectation(|xi| f.eval(x, xi)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pseudometric {
    pub value: f64,
    /// Index of the maximizing grid point.
    pub argmax: usize,
}

fn profile_gap(a: &[f64], b: &[f64]) -> Pseudometric {
    let mut best = Pseudometric { value: 0.0, argmax: 0 };
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let g = (x - y).abs();
        if g > best.value {
            best = Pseudometric { value: g, argmax: i };
        }
    }
    best
}

pub fn pseudometric(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
    grid: &DecisionGrid,
    f: &dyn ObjectiveFamily,
) -> Pseudometric {
    profile_gap(&expectation_profile(d1, grid, f), &expectation_profile(d2, grid, f))
}

fn profiles(p: &DistributionPanel, grid: &DecisionGrid, f: &dyn ObjectiveFamily) -> Vec<Vec<f64>> {
    p.members.iter().map(|d| expectation_profile(d, grid, f)).collect()
}

fn directed(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.par_iter()
        .map(|pa| b.iter().map(|pb| profile_gap(pa, pb).value).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// sup_{P∈A} inf_{Q∈B} 𝕕(P, Q).
pub fn directed_distance(
    a: &DistributionPanel,
    b: &DistributionPanel,
    grid: &DecisionGrid,
    f: &dyn ObjectiveFamily,
) -> f64 {
    directed(&profiles(a, grid, f), &profiles(b, grid, f))
}

pub fn hausdorff(p1: &DistributionPanel, p2: &DistributionPanel, grid: &DecisionGrid, f: &dyn ObjectiveFamily) -> f64 {
    let (a, b) = (profiles(p1, grid, f), profiles(p2, grid, f));
    directed(&a, &b).max(directed(&b, &a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnReport {
    /// max of the two terms below; a lower bound on the true constant.
    pub value: f64,
    /// sup over the grid of |E_P̂ f|.
    pub center_term: f64,
    /// sup over the grid and panel of |E_P f|.
    pub panel_term: f64,
    pub grid_points: usize,
    pub grid_resolution: String,
    pub panel_size: usize,
    pub panel_strategy: String,
}

pub fn c_n(problem: &TroProblem, grid: &DecisionGrid, panel: &DistributionPanel) -> CnReport {
    let f = problem.loss();
    let sup_abs = |d: &DiscreteDistribution| expectation_profile(d, grid, f).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let center_term = sup_abs(&problem.empirical());
    let panel_term = panel.members.iter().map(sup_abs).fold(0.0, f64::max);
    CnReport {
        value: center_term.max(panel_term),
        center_term,
        panel_term,
        grid_points: grid.len(),
        grid_resolution: grid.resolution.clone(),
        panel_size: panel.len(),
        panel_strategy: panel.strategy.clone(),
    }
}
