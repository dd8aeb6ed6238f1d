//! Outer minimization of the trade-off objective.

pub mod golden;
pub mod newsvendor;
pub mod portfolio;

use serde::{Deserialize, Serialize};

use crate::ambiguity::ShapeParameter;
use crate::distributions::{DiscreteDistribution, SampleSet};
use crate::error::Result;
use crate::objective::{NewsvendorParams, ObjectiveFamily, PortfolioParams};
use crate::reformulations::{NewsvendorInstance, PortfolioInstance};

pub use newsvendor::{newsvendor_upper_bound, solve_newsvendor};
pub use portfolio::{project_simplex, solve_portfolio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Decision {
    Newsvendor(f64),
    Portfolio { x: Vec<f64>, t: f64 },
}

impl Decision {
    /// Flat decision vector: `[x]` or `[x₁, …, xₙ, t]`.
    pub fn as_vec(&self) -> Vec<f64> {
        match self {
            Decision::Newsvendor(x) => vec![*x],
            Decision::Portfolio { x, t } => {
                let mut v = x.clone();
                v.push(*t);
                v
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub decision: Decision,
    /// v̂_N(θ), the objective re-evaluated at `decision`.
    pub value: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Final bracket width (newsvendor) or optimality gap bound (portfolio).
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PortfolioMethod {
    /// Central-cut/deep-cut ellipsoid method with a certified gap.
    Ellipsoid,
    /// Projected subgradient with diminishing steps and multi-start.
    Subgradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Final bracket width of the newsvendor search.
    pub x_tol: f64,
    /// Portfolio stopping gap, relative to max(1, |value|).
    pub gap_tol: f64,
    pub max_iter: usize,
    pub portfolio_method: PortfolioMethod,
    /// Subgradient steps are `step_a / (k + step_b)` along the normalized subgradient.
    pub step_a: f64,
    pub step_b: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            x_tol: 1e-8,
            gap_tol: 1e-9,
            max_iter: 20_000,
            portfolio_method: PortfolioMethod::Ellipsoid,
            step_a: 0.5,
            step_b: 10.0,
            restarts: 8,
            seed: 0,
        }
    }
}

/// One trade-off problem: data, shape parameter and loss, θ left free.
#[derive(Debug, Clone)]
pub enum TroProblem {
    Newsvendor(NewsvendorInstance),
    Portfolio(PortfolioInstance),
}

impl TroProblem {
    pub fn newsvendor(params: NewsvendorParams, shape: ShapeParameter, samples: &SampleSet) -> Result<Self> {
        Ok(TroProblem::Newsvendor(NewsvendorInstance::new(params, shape, samples)?))
    }

    pub fn portfolio(params: PortfolioParams, shape: ShapeParameter, samples: &SampleSet) -> Result<Self> {
        Ok(TroProblem::Portfolio(PortfolioInstance::new(params, shape, samples)?))
    }

    pub fn shape(&self) -> &ShapeParameter {
        match self {
            TroProblem::Newsvendor(i) => &i.shape,
            TroProblem::Portfolio(i) => &i.shape,
        }
    }

    /// P̂_N, uniform on the instance's samples.
    pub fn empirical(&self) -> DiscreteDistribution {
        let rows = match self {
            TroProblem::Newsvendor(i) => i.xi.iter().map(|&v| vec![v]).collect(),
            TroProblem::Portfolio(i) => i.sample_rows(),
        };
        DiscreteDistribution::uniform(rows).expect("instances hold at least one sample")
    }

    /// The loss f(z, ξ) with z = `Decision::as_vec`.
    pub fn loss(&self) -> &dyn ObjectiveFamily {
        match self {
            TroProblem::Newsvendor(i) => &i.params,
            TroProblem::Portfolio(i) => &i.params,
        }
    }

    pub fn objective(&self, theta: f64, d: &Decision) -> Result<f64> {
        match (self, d) {
            (TroProblem::Newsvendor(i), Decision::Newsvendor(x)) => i.tro_objective(theta, *x),
            (TroProblem::Portfolio(i), Decision::Portfolio { x, t }) => i.tro_objective(theta, x, *t),
            _ => Err(crate::TroError::InvalidParameter("decision does not match problem".into())),
        }
    }

    pub fn solve(&self, theta: f64, cfg: &SolverConfig, warm: Option<&Decision>) -> Result<SolveResult> {
        match self {
            TroProblem::Newsvendor(i) => newsvendor::solve_instance(i, theta, cfg),
            TroProblem::Portfolio(i) => portfolio::solve_instance(i, theta, cfg, warm),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub theta: f64,
    pub result: Result<SolveResult>,
}

/// Solve at each θ in order, warm-starting from the previous decision.
/// Failures are kept in place and the sweep continues.
pub fn theta_sweep(problem: &TroProblem, thetas: &[f64], cfg: &SolverConfig) -> Vec<SweepPoint> {
    let mut warm: Option<Decision> = None;
    thetas
        .iter()
        .map(|&theta| {
            let result = problem.solve(theta, cfg, warm.as_ref());
            if let Ok(r) = &result {
                warm = Some(r.decision.clone());
            }
            SweepPoint { theta, result }
        })
        .collect()
}

/// `k+1` equally spaced points on [0, 1].
pub fn theta_grid(k: usize) -> Vec<f64> {
    (0..=k).map(|i| i as f64 / k as f64).collect()
}
