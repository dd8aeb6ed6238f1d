//! Build the inventory and portfolio ambiguity sets from samples and test
//! membership of a few candidate distributions.

use tro::ambiguity::{build_table1, build_table2, contains, SetKind, Table1Params, Table2Params, DEFAULT_TOL};
use tro::distributions::{sample, GroundTruth};
use tro::set_analysis::DistributionPanel;

fn main() -> tro::Result<()> {
    let demand = sample(&GroundTruth::newsvendor_default(), 20, 1)?;
    let m = demand.moments(false);
    println!("demand: N={} mean={:.2} var={:.2}", demand.len(), m.mean[0], m.cov[0][0]);

    for kind in [SetKind::MeanVariance, SetKind::Wasserstein, SetKind::Burg, SetKind::ConfidenceInterval] {
        let sp = build_table1(&demand, kind, &Table1Params::default())?;
        let center_in = contains(&sp, &demand.empirical(), DEFAULT_TOL)?;
        println!("{:<20} radius={:<10} contains P̂_N: {center_in}", kind.name(), fmt_radius(sp.radius()));
        if let Ok(panel) = DistributionPanel::generate(&sp, 4, 7) {
            let inside = panel.members.iter().filter(|q| contains(&sp, q, DEFAULT_TOL).unwrap_or(false)).count();
            println!("{:<20} {inside}/{} generated members pass the predicate ({})", "", panel.len(), panel.strategy);
        }
    }

    let returns = sample(&GroundTruth::portfolio_default(), 50, 1)?;
    for kind in [SetKind::MeanVariance, SetKind::Wasserstein, SetKind::TotalVariation] {
        let sp = build_table2(&returns, kind, &Table2Params::default())?;
        println!("portfolio {:<16} radius={}", kind.name(), fmt_radius(sp.radius()));
    }
    Ok(())
}

fn fmt_radius(r: Option<f64>) -> String {
    r.map_or("-".into(), |r| format!("{r:.4}"))
}
