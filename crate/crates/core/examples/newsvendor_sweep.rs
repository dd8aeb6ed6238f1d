//! Optimal value and order quantity of the inventory problem along θ ∈ [0, 1]
//! for each ambiguity set, from one sample of 100 demands.

use tro::ambiguity::{build_table1, SetKind, Table1Params};
use tro::distributions::{sample, GroundTruth};
use tro::objective::NewsvendorParams;
use tro::solvers::{theta_grid, theta_sweep, Decision, SolverConfig, TroProblem};

fn main() -> tro::Result<()> {
    let s = sample(&GroundTruth::newsvendor_default(), 100, 2024)?;
    let thetas = theta_grid(10);
    println!("{:<20} {:>5} {:>12} {:>10}", "set", "θ", "profit", "order");
    for kind in [SetKind::MeanVariance, SetKind::Wasserstein, SetKind::Burg, SetKind::ConfidenceInterval] {
        let sp = build_table1(&s, kind, &Table1Params::default())?;
        let prob = TroProblem::newsvendor(NewsvendorParams::default(), sp, &s)?;
        for pt in theta_sweep(&prob, &thetas, &SolverConfig::default()) {
            let r = pt.result?;
            let Decision::Newsvendor(x) = r.decision else { unreachable!() };
            // costs are minimized; the profit is their negative
            println!("{:<20} {:>5.1} {:>12.2} {:>10.2}", kind.name(), pt.theta, -r.value, x);
        }
    }
    Ok(())
}
