//! Run configuration: defaults per experiment, overridable by a config file
//! and CLI flags.
//!
//! The file format is flat `key = value` lines plus repeated `[set]` blocks;
//! `#` starts a comment. A key may be scoped to one experiment with a prefix
//! (`bias.replications = 200`); unscoped keys apply to every experiment.
//!
//! ```text
//! problem = newsvendor
//! seed = 7
//! thetas = 0:0.01:1          # or a list "0, 0.5, 1", or "10/N"
//! bias.sizes = 10
//! bias.replications = 1000
//! ks.ks_divisor = std        # std | variance
//!
//! [set]
//! id = b
//! kind = wasserstein
//! radius = 100
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::truth::TrueValues;
use crate::ambiguity::SetKind;
use crate::error::{Result, TroError};
use crate::solvers::{PortfolioMethod, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Experiment {
    ThetaSweep,
    BiasStd,
    Convergence,
    Ks,
    Properties,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::ThetaSweep, Experiment::BiasStd, Experiment::Convergence, Experiment::Ks, Experiment::Properties];

    /// Record id, as in the `experiment` CSV column.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ThetaSweep => "theta-sweep",
            Experiment::BiasStd => "bias-std",
            Experiment::Convergence => "convergence",
            Experiment::Ks => "ks",
            Experiment::Properties => "properties",
        }
    }

    /// Key prefix and CLI subcommand.
    pub fn short(self) -> &'static str {
        match self {
            Experiment::ThetaSweep => "sweep",
            Experiment::BiasStd => "bias",
            Experiment::Convergence => "converge",
            Experiment::Ks => "ks",
            Experiment::Properties => "props",
        }
    }

    fn from_short(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.short() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    Newsvendor,
    Portfolio,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Newsvendor => "newsvendor",
            ProblemKind::Portfolio => "portfolio",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "newsvendor" => Ok(ProblemKind::Newsvendor),
            "portfolio" => Ok(ProblemKind::Portfolio),
            _ => Err(format!("unknown problem `{s}` (newsvendor | portfolio)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ThetaRule {
    Grid(Vec<f64>),
    /// θ_N = min(1, c/N).
    Inverse(f64),
}

impl ThetaRule {
    pub fn thetas(&self, n: usize) -> Vec<f64> {
        match self {
            ThetaRule::Grid(g) => g.clone(),
            ThetaRule::Inverse(c) => vec![(c / n as f64).min(1.0)],
        }
    }
}

impl fmt::Display for ThetaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaRule::Grid(g) => write!(f, "{} points on [{}, {}]", g.len(), g[0], g[g.len() - 1]),
            ThetaRule::Inverse(c) => write!(f, "{c}/N"),
        }
    }
}

/// Divisor of the standardized optimal value √N(v̂ − v⋆)/s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KsDivisor {
    /// s = √V⋆.
    StdDev,
    /// s = V⋆.
    Variance,
}

/// One configured ambiguity set; `radius` overrides the study default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetSpec {
    pub id: String,
    pub kind: SetKind,
    pub radius: Option<f64>,
    /// Bessel-corrected σ̂ in the interval half-width.
    pub bessel: bool,
}

impl SetSpec {
    fn new(id: &str, kind: SetKind) -> Self {
        Self { id: id.into(), kind, radius: None, bessel: false }
    }
}

/// The study's sets (a)–(d) / (a)–(c).
pub fn default_sets(problem: ProblemKind) -> Vec<SetSpec> {
    match problem {
        ProblemKind::Newsvendor => vec![
            SetSpec::new("a", SetKind::MeanVariance),
            SetSpec::new("b", SetKind::Wasserstein),
            SetSpec::new("c", SetKind::Burg),
            SetSpec::new("d", SetKind::ConfidenceInterval),
        ],
        ProblemKind::Portfolio => vec![
            SetSpec::new("a", SetKind::MeanVariance),
            SetSpec::new("b", SetKind::Wasserstein),
            SetSpec::new("c", SetKind::TotalVariation),
        ],
    }
}

/// Everything one experiment run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub problem: ProblemKind,
    pub sets: Vec<SetSpec>,
    pub sizes: Vec<usize>,
    pub thetas: ThetaRule,
    /// Replications (bias, KS) or seeds (convergence, properties).
    pub replications: usize,
    pub seed: u64,
    /// Overrides the configured true optimal value.
    pub v_star: Option<f64>,
    pub ks_divisor: KsDivisor,
    pub bootstrap_resamples: usize,
    /// Draw a fresh sample for every θ instead of sharing one per replication.
    pub independent_theta_samples: bool,
    pub panel_size: usize,
    pub solver: SolverConfig,
    /// True values from a re-derivation run; replaces the configured ones.
    pub truth: Option<TrueValues>,
}

pub fn theta_range(lo: f64, step: f64, hi: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| if i == k { hi } else { lo + step * i as f64 }).collect()
}

impl ExperimentConfig {
    /// Study-scale defaults.
    pub fn defaults(experiment: Experiment, problem: ProblemKind) -> Self {
        let grid = ThetaRule::Grid(theta_range(0.0, 0.01, 1.0));
        let sweep_n = match problem {
            ProblemKind::Newsvendor => 100,
            ProblemKind::Portfolio => 500,
        };
        let (sizes, thetas, replications) = match experiment {
            Experiment::ThetaSweep => (vec![sweep_n], grid, 1),
            Experiment::BiasStd => (vec![10], grid, 1000),
            Experiment::Convergence => (vec![10, 50, 100, 500, 1000], ThetaRule::Inverse(10.0), 20),
            Experiment::Ks => (vec![10, 100, 1000], ThetaRule::Inverse(10.0), 1000),
            Experiment::Properties => (vec![sweep_n], grid, 2),
        };
        Self {
            experiment,
            problem,
            sets: default_sets(problem),
            sizes,
            thetas,
            replications,
            seed: 1,
            v_star: None,
            ks_divisor: KsDivisor::StdDev,
            bootstrap_resamples: 2000,
            independent_theta_samples: false,
            panel_size: 16,
            solver: SolverConfig::default(),
            truth: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TroError::InvalidParameter(m));
        if self.replications == 0 {
            return bad("replications must be ≥ 1".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sample sizes must be ≥ 1".into());
        }
        if let ThetaRule::Grid(g) = &self.thetas {
            if g.is_empty() || g.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return bad("θ grid must be a nonempty subset of [0, 1]".into());
            }
        }
        if self.sets.is_empty() {
            return bad("no sets selected".into());
        }
        if self.problem == ProblemKind::Portfolio
            && self.sets.iter().any(|s| matches!(s.kind, SetKind::Burg | SetKind::ConfidenceInterval))
        {
            return bad("the portfolio study supports mean-variance, wasserstein and total-variation sets".into());
        }
        if self.problem == ProblemKind::Newsvendor && self.sets.iter().any(|s| s.kind == SetKind::TotalVariation) {
            return bad("the newsvendor study has no total-variation set".into());
        }
        Ok(())
    }

    /// Keep only the sets whose ids are listed.
    pub fn select_sets(&mut self, ids: &[String]) -> Result<()> {
        for id in ids {
            if !self.sets.iter().any(|s| &s.id == id) {
                return Err(TroError::InvalidParameter(format!("unknown set id `{id}`")));
            }
        }
        self.sets.retain(|s| ids.contains(&s.id));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Setting {
    Problem(ProblemKind),
    Seed(u64),
    Sizes(Vec<usize>),
    Thetas(ThetaRule),
    Replications(usize),
    VStar(f64),
    KsDivisor(KsDivisor),
    Bootstrap(usize),
    IndependentTheta(bool),
    PanelSize(usize),
    PortfolioMethod(PortfolioMethod),
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    scope: Option<Experiment>,
    setting: Setting,
}

/// A parsed config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    entries: Vec<Entry>,
    sets: Vec<SetSpec>,
    /// Raw text, echoed into the manifest.
    pub text: String,
}

fn cfg_err(line: usize, message: impl Into<String>) -> TroError {
    TroError::Config { line, message: message.into() }
}

fn parse_num<T: FromStr>(v: &str, line: usize, what: &str) -> Result<T> {
    v.parse().map_err(|_| cfg_err(line, format!("{what}: cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(v: &str, line: usize, what: &str) -> Result<Vec<T>> {
    v.split(',').map(|x| parse_num(x.trim(), line, what)).collect()
}

fn parse_thetas(v: &str, line: usize) -> Result<ThetaRule> {
    if let Some(c) = v.strip_suffix("/N") {
        let c: f64 = parse_num(c.trim(), line, "thetas")?;
        if !(c > 0.0) {
            return Err(cfg_err(line, "thetas: the c in c/N must be positive"));
        }
        return Ok(ThetaRule::Inverse(c));
    }
    let g = if v.contains(':') {
        let p: Vec<f64> = v.split(':').map(|x| parse_num(x.trim(), line, "thetas")).collect::<Result<_>>()?;
        if p.len() != 3 || !(p[1] > 0.0) || p[2] < p[0] {
            return Err(cfg_err(line, "thetas: range must be lo:step:hi with step > 0"));
        }
        theta_range(p[0], p[1], p[2])
    } else {
        parse_list(v, line, "thetas")?
    };
    if g.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(cfg_err(line, "thetas must lie in [0, 1]"));
    }
    Ok(ThetaRule::Grid(g))
}

fn parse_setting(key: &str, v: &str, line: usize) -> Result<Setting> {
    let positive = |n: usize, what: &str| {
        if n == 0 {
            Err(cfg_err(line, format!("{what} must be ≥ 1")))
        } else {
            Ok(n)
        }
    };
    Ok(match key {
        "problem" => Setting::Problem(v.parse().map_err(|e: String| cfg_err(line, e))?),
        "seed" => Setting::Seed(parse_num(v, line, key)?),
        "sizes" => {
            let s: Vec<usize> = parse_list(v, line, key)?;
            if s.contains(&0) {
                return Err(cfg_err(line, "sizes must be ≥ 1"));
            }
            Setting::Sizes(s)
        }
        "thetas" => Setting::Thetas(parse_thetas(v, line)?),
        "replications" => Setting::Replications(positive(parse_num(v, line, key)?, key)?),
        "v_star" => Setting::VStar(parse_num(v, line, key)?),
        "ks_divisor" => Setting::KsDivisor(match v {
            "std" => KsDivisor::StdDev,
            "variance" => KsDivisor::Variance,
            _ => return Err(cfg_err(line, format!("ks_divisor: `{v}` (std | variance)"))),
        }),
        "bootstrap" => Setting::Bootstrap(positive(parse_num(v, line, key)?, key)?),
        "independent_theta_samples" => Setting::IndependentTheta(parse_num(v, line, key)?),
        "panel_size" => Setting::PanelSize(positive(parse_num(v, line, key)?, key)?),
        "portfolio_method" => Setting::PortfolioMethod(match v {
            "ellipsoid" => PortfolioMethod::Ellipsoid,
            "subgradient" => PortfolioMethod::Subgradient,
            _ => return Err(cfg_err(line, format!("portfolio_method: `{v}` (ellipsoid | subgradient)"))),
        }),
        _ => return Err(cfg_err(line, format!("unknown key `{key}`"))),
    })
}

/// Parse the config file text. Errors carry 1-based line numbers.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile { text: text.to_string(), ..Default::default() };
    // (block start line, fields seen so far)
    let mut block: Option<(usize, SetBuilder)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if s.starts_with('[') {
            if s != "[set]" {
                return Err(cfg_err(line, format!("unknown section `{s}` (only [set])")));
            }
            if let Some((start, b)) = block.take() {
                cfg.sets.push(b.finish(start)?);
            }
            block = Some((line, SetBuilder::default()));
            continue;
        }
        let (k, v) = s
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| cfg_err(line, format!("expected `key = value`, got `{s}`")))?;
        if v.is_empty() {
            return Err(cfg_err(line, format!("`{k}` has no value")));
        }
        if let Some((_, b)) = block.as_mut() {
            b.set(k, v, line)?;
            continue;
        }
        let (scope, key) = match k.split_once('.') {
            Some((p, key)) => {
                let e = Experiment::from_short(p)
                    .ok_or_else(|| cfg_err(line, format!("unknown experiment prefix `{p}`")))?;
                (Some(e), key)
            }
            None => (None, k),
        };
        let setting = parse_setting(key, v, line)?;
        if scope.is_some() && matches!(setting, Setting::Problem(_)) {
            return Err(cfg_err(line, "`problem` cannot be scoped to one experiment"));
        }
        cfg.entries.push(Entry { scope, setting });
    }
    if let Some((start, b)) = block.take() {
        cfg.sets.push(b.finish(start)?);
    }
    let mut ids: Vec<&str> = cfg.sets.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(cfg_err(0, "duplicate [set] id"));
    }
    Ok(cfg)
}

#[derive(Debug, Default)]
struct SetBuilder {
    id: Option<String>,
    kind: Option<SetKind>,
    radius: Option<f64>,
    bessel: bool,
}

impl SetBuilder {
    fn set(&mut self, k: &str, v: &str, line: usize) -> Result<()> {
        match k {
            "id" => self.id = Some(v.to_string()),
            "kind" => self.kind = Some(v.parse().map_err(|e: TroError| cfg_err(line, e.to_string()))?),
            "radius" => {
                let r: f64 = parse_num(v, line, k)?;
                if !(r >= 0.0) || !r.is_finite() {
                    return Err(cfg_err(line, "radius must be finite and ≥ 0"));
                }
                self.radius = Some(r);
            }
            "bessel" => self.bessel = parse_num(v, line, k)?,
            _ => return Err(cfg_err(line, format!("unknown [set] key `{k}` (id, kind, radius, bessel)"))),
        }
        Ok(())
    }

    fn finish(self, line: usize) -> Result<SetSpec> {
        let id = self.id.ok_or_else(|| cfg_err(line, "[set] block without `id`"))?;
        let kind = self.kind.ok_or_else(|| cfg_err(line, "[set] block without `kind`"))?;
        Ok(SetSpec { id, kind, radius: self.radius, bessel: self.bessel })
    }
}

impl ConfigFile {
    /// The `problem` key, if given.
    pub fn problem(&self) -> Option<ProblemKind> {
        self.entries.iter().rev().find_map(|e| match e.setting {
            Setting::Problem(p) => Some(p),
            _ => None,
        })
    }

    /// Defaults for `experiment`, then unscoped keys, then scoped keys.
    pub fn resolve(&self, experiment: Experiment, problem: ProblemKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::defaults(experiment, problem);
        if !self.sets.is_empty() {
            c.sets = self.sets.clone();
        }
        let unscoped = self.entries.iter().filter(|e| e.scope.is_none());
        let scoped = self.entries.iter().filter(|e| e.scope == Some(experiment));
        for e in unscoped.chain(scoped) {
            match &e.setting {
                Setting::Problem(_) => {}
                Setting::Seed(s) => c.seed = *s,
                Setting::Sizes(s) => c.sizes = s.clone(),
                Setting::Thetas(t) => c.thetas = t.clone(),
                Setting::Replications(r) => c.replications = *r,
                Setting::VStar(v) => c.v_star = Some(*v),
                Setting::KsDivisor(d) => c.ks_divisor = *d,
                Setting::Bootstrap(b) => c.bootstrap_resamples = *b,
                Setting::IndependentTheta(b) => c.independent_theta_samples = *b,
                Setting::PanelSize(p) => c.panel_size = *p,
                Setting::PortfolioMethod(m) => c.solver.portfolio_method = *m,
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scoped_keys_override_unscoped() {
        let text = "seed = 9\nreplications = 5\nbias.replications = 7 # comment\nthetas = 0:0.5:1\n\n[set]\nid = b\nkind = wasserstein\nradius = 3\n";
        let f = parse_config(text).unwrap();
        let b = f.resolve(Experiment::BiasStd, ProblemKind::Newsvendor);
        assert_eq!((b.seed, b.replications), (9, 7));
        assert_eq!(b.thetas, ThetaRule::Grid(vec![0.0, 0.5, 1.0]));
        assert_eq!(b.sets.len(), 1);
        assert_eq!(b.sets[0].radius, Some(3.0));
        assert_eq!(f.resolve(Experiment::Ks, ProblemKind::Newsvendor).replications, 5);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_config("seed = 1\nreplications = 0\n").unwrap_err();
        assert!(matches!(e, TroError::Config { line: 2, .. }), "{e}");
        let e = parse_config("seed = 1\n[set]\nid = a\nkind = nope\n").unwrap_err();
        assert!(matches!(e, TroError::Config { line: 4, .. }));
        let e = parse_config("[set]\nid = a\n").unwrap_err();
        assert!(matches!(e, TroError::Config { line: 1, .. }));
        let e = parse_config("colour = red").unwrap_err();
        assert!(matches!(e, TroError::Config { line: 1, .. }));
        assert!(parse_config("thetas = 0, 1.5").is_err());
    }

    #[test]
    fn inverse_rule() {
        let f = parse_config("thetas = 10/N").unwrap();
        let c = f.resolve(Experiment::Convergence, ProblemKind::Newsvendor);
        assert_eq!(c.thetas.thetas(10), vec![1.0]);
        assert_eq!(c.thetas.thetas(1000), vec![0.01]);
        assert_eq!(theta_range(0.0, 0.01, 1.0).len(), 101);
    }
}
