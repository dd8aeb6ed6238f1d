//! Star-shape and nesting of the trade-off sets, and the two-point family
//! whose trade-off sets are not nested.

use tro::ambiguity::{build_table1, SetKind, Table1Params};
use tro::distributions::{sample, GroundTruth};
use tro::set_analysis::suites::{alpha_grid, two_point_check, contains_center, hierarchy_suite, star_center_suite};
use tro::set_analysis::DistributionPanel;
use tro::solvers::theta_grid;

fn main() -> tro::Result<()> {
    let s = sample(&GroundTruth::newsvendor_default(), 8, 11)?;
    let center = s.empirical();
    for kind in [SetKind::Wasserstein, SetKind::Burg, SetKind::ConfidenceInterval] {
        let sp = build_table1(&s, kind, &Table1Params::default())?;
        if !contains_center(&sp, &center)? {
            println!("{:<20} P̂_N is not in the set: no star center to test", kind.name());
            continue;
        }
        let panel = DistributionPanel::generate(&sp, 8, 3)?;
        let star = star_center_suite(&sp, &center, &panel, &alpha_grid())?;
        let nest = hierarchy_suite(&sp, &center, &panel, &theta_grid(10))?;
        println!("{:<20} star misses {} ({}), nesting misses {} ({})", kind.name(), star.observed, star.detail, nest.observed, nest.detail);
    }
    let b = two_point_check(&theta_grid(10))?;
    println!("two-point family: {}", b.detail);
    Ok(())
}
