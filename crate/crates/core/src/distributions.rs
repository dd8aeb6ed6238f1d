//! Finite-support measures, ground-truth samplers and moment estimators.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TroError};
use crate::linalg::{cholesky_psd, Matrix};
use crate::rng::rng_from_seed;

pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A probability measure on finitely many points of ℝ^ℓ.
///
/// Duplicate atoms are kept as separate entries: divergence balls index
/// weights by sample position, so merging would change the set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    support: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(TroError::InvalidDistribution("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(TroError::InvalidDistribution(format!(
                "{} support points but {} weights",
                support.len(),
                weights.len()
            )));
        }
        let dim = support[0].len();
        if dim == 0 || support.iter().any(|p| p.len() != dim) {
            return Err(TroError::InvalidDistribution(
                "support points must share a positive dimension".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(TroError::InvalidDistribution(format!("bad weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(TroError::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Self { support, weights })
    }

    /// Equal weights 1/N on the given atoms.
    pub fn uniform(support: Vec<Vec<f64>>) -> Result<Self> {
        let n = support.len();
        Self::new(support, vec![1.0 / n as f64; n])
    }

    pub fn point_mass(point: Vec<f64>) -> Self {
        Self {
            support: vec![point],
            weights: vec![1.0],
        }
    }

    /// Scalar atoms with the given weights.
    pub fn from_scalars(values: &[f64], weights: Vec<f64>) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect(), weights)
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.support[0].len()
    }

    /// First coordinates of the atoms (the whole point when ℓ = 1).
    pub fn scalars(&self) -> Vec<f64> {
        self.support.iter().map(|p| p[0]).collect()
    }

    /// Same atoms, new weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.support.clone(), weights)
    }

    pub fn expectation(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    /// Population-form mean and covariance (weights as given).
    pub fn moments(&self) -> Moments {
        let l = self.dim();
        let mut mean = vec![0.0; l];
        for (p, w) in self.support.iter().zip(&self.weights) {
            for k in 0..l {
                mean[k] += w * p[k];
            }
        }
        let mut cov = vec![vec![0.0; l]; l];
        for (p, w) in self.support.iter().zip(&self.weights) {
            for a in 0..l {
                let da = p[a] - mean[a];
                for b in a..l {
                    cov[a][b] += w * da * (p[b] - mean[b]);
                }
            }
        }
        for a in 0..l {
            for b in 0..a {
                cov[a][b] = cov[b][a];
            }
        }
        Moments { mean, cov }
    }

    /// `(1−θ)·self + θ·other`, formed by concatenating supports.
    pub fn mixture(&self, theta: f64, other: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(TroError::InvalidParameter(format!("mixture weight {theta}")));
        }
        if self.dim() != other.dim() {
            return Err(TroError::InvalidDistribution("dimension mismatch".into()));
        }
        let mut support = self.support.clone();
        support.extend(other.support.iter().cloned());
        let mut weights: Vec<f64> = self.weights.iter().map(|w| (1.0 - theta) * w).collect();
        weights.extend(other.weights.iter().map(|w| theta * w));
        // rounding in the scaled weights can drift past the strict sum check
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Self::new(support, weights)
    }

    /// Mixture that reweights shared atoms when `other` lives on the same
    /// support (the usual case for divergence balls), otherwise concatenates.
    pub fn blend(&self, theta: f64, other: &Self) -> Result<Self> {
        if self.support == other.support {
            let weights = self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| (1.0 - theta) * a + theta * b)
                .collect();
            self.reweighted(weights)
        } else {
            self.mixture(theta, other)
        }
    }

    pub fn is_point_mass(&self) -> Option<&[f64]> {
        let mut charged = (0..self.len()).filter(|&i| self.weights[i] > 0.0);
        let first = &self.support[charged.next()?];
        charged
            .all(|i| self.support[i] == *first)
            .then_some(first.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub cov: Matrix,
}

/// Mean and covariance of a distribution; `bessel` rescales the covariance
/// by N/(N−1), which is only meaningful for equal-weight empirical measures.
pub fn moments(d: &DiscreteDistribution, bessel: bool) -> Moments {
    let mut m = d.moments();
    let n = d.len();
    if bessel && n > 1 {
        let k = n as f64 / (n as f64 - 1.0);
        for row in m.cov.iter_mut() {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
    }
    m
}

/// Where a sample set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleSource {
    ExponentialDemand,
    MvnReturns,
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub draws: Vec<Vec<f64>>,
    pub seed: u64,
    pub source: SampleSource,
}

impl SampleSet {
    pub fn new(draws: Vec<Vec<f64>>, seed: u64, source: SampleSource) -> Result<Self> {
        if draws.is_empty() {
            return Err(TroError::InvalidParameter("sample set needs N ≥ 1".into()));
        }
        let dim = draws[0].len();
        if dim == 0 || draws.iter().any(|d| d.len() != dim) {
            return Err(TroError::InvalidDistribution("ragged sample set".into()));
        }
        Ok(Self { draws, seed, source })
    }

    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| vec![v]).collect(),
            0,
            SampleSource::External,
        )
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.draws[0].len()
    }

    pub fn scalars(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d[0]).collect()
    }

    pub fn empirical(&self) -> DiscreteDistribution {
        let n = self.draws.len();
        DiscreteDistribution {
            support: self.draws.clone(),
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Sample mean and population-form (or Bessel-corrected) covariance.
    pub fn moments(&self, bessel: bool) -> Moments {
        moments(&self.empirical(), bessel)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record((0..self.dim()).map(|k| format!("d{k}")))?;
        for d in &self.draws {
            wr.write_record(d.iter().map(|v| v.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let width = rd.headers()?.len();
        let mut draws = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            if rec.len() != width {
                return Err(TroError::InvalidDistribution(format!("row {} has {} columns", i + 1, rec.len())));
            }
            let row = rec
                .iter()
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| {
                        TroError::InvalidDistribution(format!("row {}: {e}", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            draws.push(row);
        }
        Self::new(draws, 0, SampleSource::External)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroundTruth {
    Exponential { mean: f64 },
    MultivariateNormal { mean: Vec<f64>, cov: Matrix },
}

impl GroundTruth {
    /// Demand law of the inventory study.
    pub fn newsvendor_default() -> Self {
        GroundTruth::Exponential { mean: 50.0 }
    }

    /// Asset-return law of the portfolio study.
    pub fn portfolio_default() -> Self {
        GroundTruth::MultivariateNormal {
            mean: vec![0.06116, 0.109547, 0.090358, 0.040923],
            cov: vec![
                vec![0.018632, 0.020056, 0.020646, 0.015213],
                vec![0.020056, 0.034507, 0.027412, 0.020652],
                vec![0.020646, 0.027412, 0.048680, 0.021663],
                vec![0.015213, 0.020652, 0.021663, 0.018791],
            ],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroundTruth::Exponential { .. } => 1,
            GroundTruth::MultivariateNormal { mean, .. } => mean.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroundTruth::Exponential { mean } => {
                if !(*mean > 0.0) || !mean.is_finite() {
                    return Err(TroError::InvalidParameter(format!("exponential mean {mean}")));
                }
            }
            GroundTruth::MultivariateNormal { mean, cov } => {
                if mean.is_empty() || cov.len() != mean.len() {
                    return Err(TroError::InvalidParameter("mean/covariance shape mismatch".into()));
                }
                cholesky_psd(cov)?;
            }
        }
        Ok(())
    }
}

/// Draw `n` i.i.d. points; a pure function of `(gt, n, seed)`.
pub fn sample(gt: &GroundTruth, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(TroError::InvalidParameter("sample size must be ≥ 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let draws = match gt {
        GroundTruth::Exponential { mean } => {
            gt.validate()?;
            (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    vec![-mean * (1.0 - u).ln()]
                })
                .collect()
        }
        GroundTruth::MultivariateNormal { mean, cov } => {
            if cov.len() != mean.len() {
                return Err(TroError::InvalidParameter("mean/covariance shape mismatch".into()));
            }
            let l = cholesky_psd(cov)?;
            let k = mean.len();
            let mut z = vec![0.0; k];
            (0..n)
                .map(|_| {
                    for zi in z.iter_mut() {
                        *zi = rng.sample(StandardNormal);
                    }
                    (0..k)
                        .map(|i| mean[i] + (0..=i).map(|j| l[i][j] * z[j]).sum::<f64>())
                        .collect()
                })
                .collect()
        }
    };
    let source = match gt {
        GroundTruth::Exponential { .. } => SampleSource::ExponentialDemand,
        GroundTruth::MultivariateNormal { .. } => SampleSource::MvnReturns,
    };
    SampleSet::new(draws, seed, source)
}
