//! Grid-based set geometry: the pseudometric between two laws, the constant
//! C_N, and the concavity and Lipschitz checks on a θ-sweep.

use tro::ambiguity::{build_table1, SetKind, Table1Params};
use tro::distributions::{sample, GroundTruth};
use tro::objective::NewsvendorParams;
use tro::set_analysis::{c_n, check_concavity, check_lipschitz, check_monotone, pseudometric, DecisionGrid, DistributionPanel};
use tro::solvers::{theta_grid, theta_sweep, SolverConfig, TroProblem};

fn main() -> tro::Result<()> {
    let s = sample(&GroundTruth::newsvendor_default(), 100, 5)?;
    let sp = build_table1(&s, SetKind::Burg, &Table1Params::default())?;
    let prob = TroProblem::newsvendor(NewsvendorParams::default(), sp.clone(), &s)?;
    let grid = DecisionGrid::newsvendor_default(&s)?;
    let panel = DistributionPanel::generate(&sp, 16, 1)?;

    let d = pseudometric(&s.empirical(), &panel.members[0], &grid, &NewsvendorParams::default());
    println!("𝕕(P̂_N, panel[0]) = {:.4} at x = {:.2}", d.value, grid.points[d.argmax][0]);

    let cn = c_n(&prob, &grid, &panel);
    println!("C_N ≥ {:.2} ({} grid points, {} panel members)", cn.value, cn.grid_points, cn.panel_size);

    let thetas = theta_grid(100);
    let values: Vec<f64> = theta_sweep(&prob, &thetas, &SolverConfig::default())
        .into_iter()
        .map(|p| p.result.map(|r| r.value))
        .collect::<tro::Result<_>>()?;
    let mut reports = check_concavity(&thetas, &values, cn.value)?.checks();
    reports.push(check_monotone(&values));
    reports.push(check_lipschitz(&thetas, &values, cn.value, 1e-9));
    for r in reports {
        println!("{:<30} observed {:>12.4e} bound {:>12.4e} {}", r.check, r.observed, r.bound, if r.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
