//! Run a θ-sweep from a config file and write the CSV records, as `tro sweep`
//! does.

use tro::harness::{parse_config, read_records, run_experiment, write_records, Experiment, ProblemKind};

const CONFIG: &str = "\
seed = 42
sizes = 50
thetas = 0:0.25:1

[set]
id = w
kind = wasserstein
radius = 25
";

fn main() -> tro::Result<()> {
    let cfg = parse_config(CONFIG)?.resolve(Experiment::ThetaSweep, ProblemKind::Newsvendor);
    let recs = run_experiment(&cfg)?;
    let path = std::env::temp_dir().join("tro-example-records.csv");
    write_records(std::fs::File::create(&path)?, &recs)?;
    println!("wrote {} records to {}", recs.len(), path.display());
    for r in read_records(&path)?.iter().filter(|r| r.metric == "value") {
        println!("  set {} θ={:.2} value={:.3}", r.set, r.theta.unwrap(), r.value);
    }
    Ok(())
}
