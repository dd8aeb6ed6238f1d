//! Mean–CVaR portfolio weights along θ for the three portfolio ambiguity sets.

use tro::ambiguity::{build_table2, SetKind, Table2Params};
use tro::distributions::{sample, GroundTruth};
use tro::objective::PortfolioParams;
use tro::solvers::{theta_grid, theta_sweep, Decision, SolverConfig, TroProblem};

fn main() -> tro::Result<()> {
    let s = sample(&GroundTruth::portfolio_default(), 200, 7)?;
    let params = PortfolioParams::for_samples(&s);
    for kind in [SetKind::MeanVariance, SetKind::Wasserstein, SetKind::TotalVariation] {
        let prob = TroProblem::portfolio(params, build_table2(&s, kind, &Table2Params::default())?, &s)?;
        println!("{}", kind.name());
        for pt in theta_sweep(&prob, &theta_grid(4), &SolverConfig::default()) {
            let r = pt.result?;
            let Decision::Portfolio { x, t } = &r.decision else { unreachable!() };
            let w: Vec<String> = x.iter().map(|v| format!("{v:.3}")).collect();
            println!("  θ={:.2} value={:.5} x=[{}] t={t:.4}", pt.theta, r.value, w.join(", "));
        }
    }
    Ok(())
}
