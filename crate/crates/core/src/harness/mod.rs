//! Experiment orchestration: configs, runners, CSV records and the `tro` CLI.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod records;
pub mod truth;

pub use config::{parse_config, ConfigFile, Experiment, ExperimentConfig, KsDivisor, ProblemKind, SetSpec, ThetaRule};
pub use experiments::{run_bias_std, run_convergence, run_ks, run_properties, run_theta_sweep, zero_crossing};
pub use records::{read_records, write_records, Record};
pub use truth::TrueValues;

use crate::error::Result;

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    match cfg.experiment {
        Experiment::ThetaSweep => run_theta_sweep(cfg),
        Experiment::BiasStd => run_bias_std(cfg),
        Experiment::Convergence => run_convergence(cfg),
        Experiment::Ks => run_ks(cfg),
        Experiment::Properties => run_properties(cfg),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub errors: usize,
    pub checks: usize,
    /// `problem/set/rep/check` of every failed check.
    pub check_failures: Vec<String>,
}

pub fn summarize(records: &[Record]) -> Summary {
    let mut s = Summary::default();
    for r in records {
        if r.metric == "error" {
            s.errors += 1;
        } else if let Some(check) = r.metric.strip_suffix(":pass") {
            s.checks += 1;
            if r.value != 1.0 {
                let rep = r.rep.map_or(String::new(), |v| format!("/rep{v}"));
                s.check_failures.push(format!("{}/{}/{}{rep}/{check}", r.experiment, r.problem, r.set));
            }
        }
    }
    s
}
