//! Monte Carlo bias of the optimal value along θ with N = 10 (a reduced
//! replication count; `tro bias` runs the full 1000).

use tro::harness::{run_bias_std, zero_crossing, Experiment, ProblemKind};

fn main() -> tro::Result<()> {
    let file = tro::harness::parse_config("replications = 200\nthetas = 0:0.05:1\nbootstrap = 500\n")?;
    let cfg = file.resolve(Experiment::BiasStd, ProblemKind::Newsvendor);
    let recs = run_bias_std(&cfg)?;
    for set in &cfg.sets {
        let agg = |m: &str| -> Vec<(f64, f64)> {
            recs.iter()
                .filter(|r| r.set == set.id && r.rep.is_none() && r.metric == m)
                .map(|r| (r.theta.unwrap(), r.value))
                .collect()
        };
        let (bias, lo, hi, std) = (agg("bias"), agg("bias-ci-lo"), agg("bias-ci-hi"), agg("std"));
        let cis: Vec<_> = bias.iter().zip(&lo).zip(&hi).map(|((b, l), h)| (b.0, l.1, h.1)).collect();
        println!("set {} ({}) — zero crossing at θ = {:?}", set.id, set.kind.name(), zero_crossing(&cis));
        for i in (0..bias.len()).step_by(4) {
            println!("  θ={:.2} bias={:>9.2} 99% CI [{:>9.2}, {:>9.2}] std={:.2}", bias[i].0, bias[i].1, lo[i].1, hi[i].1, std[i].1);
        }
    }
    Ok(())
}
