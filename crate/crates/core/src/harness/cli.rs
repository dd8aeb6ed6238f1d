use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use super::config::{parse_config, ConfigFile, Experiment, ExperimentConfig, ProblemKind};
use super::records::{write_records, Manifest, Record, SCHEMA, SCHEMA_VERSION};
use super::truth::rederive;
use super::{run_experiment, summarize};
use crate::error::TroError;

#[derive(Debug, Parser)]
#[command(name = "tro", version, about = "Trade-off robust optimization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Config file: `key = value` lines and `[set]` blocks.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for records.csv and manifest.txt.
    #[arg(long, global = true, default_value = "tro-out")]
    pub out: PathBuf,
    /// newsvendor | portfolio (`all` runs both when omitted).
    #[arg(long, global = true)]
    pub problem: Option<ProblemKind>,
    /// Comma-separated set ids, e.g. `a,b`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sets: Option<Vec<String>>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Recompute v⋆, x⋆ and V⋆ by large-sample SAA before running.
    #[arg(long, global = true)]
    pub rederive_truth: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Optimal value and decision over a θ grid.
    Sweep,
    /// Monte Carlo bias and standard deviation of the optimal value.
    Bias,
    /// |v̂_N(θ_N) − v⋆| along N.
    Converge,
    /// Kolmogorov–Smirnov statistics of the standardized optimal value.
    Ks,
    /// Property suites (star shape, hierarchy, Lipschitz, concavity, ...).
    Props,
    /// Every experiment.
    All,
}

impl Command {
    fn experiments(self) -> Vec<Experiment> {
        match self {
            Command::Sweep => vec![Experiment::ThetaSweep],
            Command::Bias => vec![Experiment::BiasStd],
            Command::Converge => vec![Experiment::Convergence],
            Command::Ks => vec![Experiment::Ks],
            Command::Props => vec![Experiment::Properties],
            Command::All => Experiment::ALL.to_vec(),
        }
    }
}

/// Exit codes: 0 success, 1 failed checks or hard errors, 2 bad usage/config.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let file = match &cli.config {
        None => ConfigFile::default(),
        Some(p) => match std::fs::read_to_string(p).map_err(TroError::from).and_then(|t| parse_config(&t)) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("tro: {}: {e}", p.display());
                return 2;
            }
        },
    };
    let problems = match (cli.problem, file.problem(), cli.command) {
        (Some(p), ..) | (None, Some(p), _) => vec![p],
        (None, None, Command::All) => vec![ProblemKind::Newsvendor, ProblemKind::Portfolio],
        (None, None, _) => vec![ProblemKind::Newsvendor],
    };
    let mut configs: Vec<ExperimentConfig> = Vec::new();
    for &p in &problems {
        for e in cli.command.experiments() {
            let mut c = file.resolve(e, p);
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            if let Some(ids) = &cli.sets {
                if let Err(err) = c.select_sets(ids) {
                    eprintln!("tro: {err}");
                    return 2;
                }
            }
            if let Err(err) = c.validate() {
                eprintln!("tro: {} / {}: {err}", e.short(), p);
                return 2;
            }
            configs.push(c);
        }
    }
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("tro: thread pool: {e}");
            return 1;
        }
    };
    let mut manifest = Manifest::default();
    manifest.push("schema", SCHEMA);
    manifest.push("schema_version", SCHEMA_VERSION);
    manifest.push("tro_version", env!("CARGO_PKG_VERSION"));
    manifest.push(
        "command",
        argv.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" "),
    );
    manifest.push("jobs", jobs);
    manifest.push("started_unix", SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    if let Some(p) = &cli.config {
        manifest.push("config_path", p.display());
        for (i, l) in file.text.lines().enumerate() {
            manifest.push(format!("config.{}", i + 1), l);
        }
    }

    let result: Result<Vec<Record>, TroError> = pool.install(|| {
        let mut all = Vec::new();
        for &p in &problems {
            let truth = if cli.rederive_truth {
                let cfg = configs.iter().find(|c| c.problem == p).expect("one config per problem");
                Some(rederive(p, 1_000_000, 5, cfg.seed, &cfg.solver)?)
            } else {
                None
            };
            for c in configs.iter_mut().filter(|c| c.problem == p) {
                if truth.is_some() {
                    c.truth = truth.clone();
                }
                let t = super::experiments::true_values(c);
                let key = format!("{}.{}", c.experiment.short(), p);
                manifest.push(format!("{key}.seed"), c.seed);
                manifest.push(format!("{key}.sets"), c.sets.iter().map(|s| s.id.as_str()).collect::<Vec<_>>().join(","));
                manifest.push(format!("{key}.sizes"), format!("{:?}", c.sizes));
                manifest.push(format!("{key}.thetas"), &c.thetas);
                manifest.push(format!("{key}.replications"), c.replications);
                manifest.push(format!("{key}.v_star"), format!("{} ({})", t.v_star, t.source));
                manifest.push(format!("{key}.v_star_variance"), t.v_star_variance);
                all.extend(run_experiment(c)?);
            }
        }
        Ok(all)
    });
    let records = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("tro: {e}");
            return 1;
        }
    };
    let summary = summarize(&records);
    manifest.push("records", records.len());
    manifest.push("errors", summary.errors);
    manifest.push("checks", summary.checks);
    manifest.push("check_failures", summary.check_failures.len());
    for f in &summary.check_failures {
        manifest.push("failed", f);
    }
    manifest.push("wall_time_s", format!("{:.3}", started.elapsed().as_secs_f64()));

    let write = || -> Result<(), TroError> {
        std::fs::create_dir_all(&cli.out)?;
        write_records(std::fs::File::create(cli.out.join("records.csv"))?, &records)?;
        manifest.write(&cli.out.join("manifest.txt"))
    };
    if let Err(e) = write() {
        eprintln!("tro: writing {}: {e}", cli.out.display());
        return 1;
    }
    for f in &summary.check_failures {
        eprintln!("tro: check failed: {f}");
    }
    eprintln!(
        "tro: {} records, {} checks ({} failed), {} errors -> {}",
        records.len(),
        summary.checks,
        summary.check_failures.len(),
        summary.errors,
        cli.out.display()
    );
    if summary.errors > 0 || !summary.check_failures.is_empty() {
        1
    } else {
        0
    }
}
