//! Worst-case expectations sup_{P ∈ P_N} E_P[f] for every shape parameter,
//! in closed or dual form.

pub mod divergence;
pub mod newsvendor;
pub mod portfolio;

use serde::{Deserialize, Serialize};

pub use divergence::{burg_dual_nested, burg_dual_objective, burg_worst_case, tv_dual, tv_greedy};
pub use newsvendor::{nv_dirac_union_sup, nv_inner_sup, nv_saa, nv_tro_objective, NewsvendorInstance};
pub use portfolio::{lipschitz_kappa, pf_inner_sup, pf_saa, pf_tro_objective, PortfolioInstance};

/// How the worst case was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SupInfo {
    ClosedForm,
    /// Dual multipliers of a divergence ball.
    Dual { lambda: f64, tau: f64 },
    /// Worst-case reweighting of the center's atoms.
    Weights(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerSupValue {
    pub value: f64,
    pub info: SupInfo,
}

impl InnerSupValue {
    pub fn closed(value: f64) -> Self {
        Self { value, info: SupInfo::ClosedForm }
    }
}

/// Scarf's bound: sup E(ξ − x)₊ over laws with mean μ and variance σ².
pub fn scarf_excess(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    0.5 * (-d + (var.max(0.0) + d * d).sqrt())
}

/// Relative gap the greedy and dual total-variation routes may show.
pub const TV_CHECK_TOL: f64 = 1e-7;
