//! Loss functions of the two studies.

use serde::{Deserialize, Serialize};

use crate::distributions::SampleSet;
use crate::error::{Result, TroError};

/// A loss f(z, ξ) over a flat decision vector z.
pub trait ObjectiveFamily: Sync {
    fn eval(&self, decision: &[f64], xi: &[f64]) -> f64;
}

/// Newsvendor economics: unit cost `c`, selling price `p`, salvage value `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewsvendorParams {
    pub c: f64,
    pub p: f64,
    pub h: f64,
}

impl Default for NewsvendorParams {
    fn default() -> Self {
        Self { c: 2.0, p: 30.0, h: 1.0 }
    }
}

impl NewsvendorParams {
    pub fn validate(&self) -> Result<()> {
        if self.p > self.c && self.c > self.h && self.h >= 0.0 {
            Ok(())
        } else {
            Err(TroError::InvalidParameter(format!(
                "need p > c > h ≥ 0, got p={} c={} h={}",
                self.p, self.c, self.h
            )))
        }
    }

    /// (c−h)x + (p−h)[(ξ−x)₊ − ξ]; negative values are profits.
    pub fn cost(&self, x: f64, xi: f64) -> f64 {
        (self.c - self.h) * x + (self.p - self.h) * shortfall(x, xi)
    }

    /// Critical ratio (p−c)/(p−h).
    pub fn critical_ratio(&self) -> f64 {
        (self.p - self.c) / (self.p - self.h)
    }
}

/// (ξ−x)₊ − ξ = max(−x, −ξ), the random part of the newsvendor cost.
#[inline]
pub fn shortfall(x: f64, xi: f64) -> f64 {
    (xi - x).max(0.0) - xi
}

impl ObjectiveFamily for NewsvendorParams {
    fn eval(&self, decision: &[f64], xi: &[f64]) -> f64 {
        self.cost(decision[0], xi[0])
    }
}

/// Mean–CVaR portfolio: risk weight `beta`, CVaR level `alpha`, `n` assets,
/// and the box |t| ≤ `t_bound` on the VaR variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioParams {
    pub beta: f64,
    pub alpha: f64,
    pub n: usize,
    pub t_bound: f64,
}

impl PortfolioParams {
    pub fn new(beta: f64, alpha: f64, n: usize, t_bound: f64) -> Result<Self> {
        let p = Self { beta, alpha, n, t_bound };
        p.validate()?;
        Ok(p)
    }

    /// β = 0.5, α = 0.95 with `t_bound` = 10·maxᵢ‖ξ̂ᵢ‖₁.
    pub fn for_samples(samples: &SampleSet) -> Self {
        Self {
            beta: 0.5,
            alpha: 0.95,
            n: samples.dim(),
            t_bound: default_t_bound(samples),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !open(self.beta) || !open(self.alpha) || !(self.t_bound > 0.0) || self.n == 0 {
            return Err(TroError::InvalidParameter(format!("portfolio parameters {self:?}")));
        }
        Ok(())
    }

    /// (1−β)/(1−α), the weight on the CVaR excess.
    pub fn cvar_coef(&self) -> f64 {
        (1.0 - self.beta) / (1.0 - self.alpha)
    }

    /// (1−β)t + β(−xᵀξ) + c(−xᵀξ − t)₊.
    pub fn loss(&self, x: &[f64], t: f64, xi: &[f64]) -> f64 {
        let r = -x.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
        self.loss_from_return(t, r)
    }

    /// The loss given the portfolio loss r = −xᵀξ.
    #[inline]
    pub fn loss_from_return(&self, t: f64, r: f64) -> f64 {
        (1.0 - self.beta) * t + self.beta * r + self.cvar_coef() * (r - t).max(0.0)
    }
}

impl ObjectiveFamily for PortfolioParams {
    /// `decision` = (x₁, …, xₙ, t).
    fn eval(&self, decision: &[f64], xi: &[f64]) -> f64 {
        let n = decision.len() - 1;
        self.loss(&decision[..n], decision[n], xi)
    }
}

pub fn default_t_bound(samples: &SampleSet) -> f64 {
    let m = samples
        .draws
        .iter()
        .map(|d| d.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if m > 0.0 {
        10.0 * m
    } else {
        1.0
    }
}
