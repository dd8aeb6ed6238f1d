//! Convergence of v̂_N(θ_N) with θ_N = 10/N, and the Kolmogorov–Smirnov
//! distance of the standardized optimal value from N(0, 1).

use tro::harness::{run_convergence, run_ks, Experiment, ProblemKind};

fn main() -> tro::Result<()> {
    let file = tro::harness::parse_config("ks.replications = 200\nks.sizes = 10, 100, 1000\n")?;
    let conv = run_convergence(&file.resolve(Experiment::Convergence, ProblemKind::Newsvendor))?;
    let ks = run_ks(&file.resolve(Experiment::Ks, ProblemKind::Newsvendor))?;
    for (title, recs, metric) in [("median |v̂ − v⋆|", &conv, "median-abs-diff"), ("KS statistic", &ks, "ks-stat")] {
        println!("{title}");
        for set in ["a", "b", "c", "d"] {
            let row: Vec<String> = recs
                .iter()
                .filter(|r| r.set == set && r.metric == metric)
                .map(|r| format!("N={}: {:.4}", r.n.unwrap(), r.value))
                .collect();
            println!("  {set}: {}", row.join("  "));
        }
    }
    Ok(())
}
