//! True optimal values: the newsvendor closed form, the configured values,
//! and a large-sample SAA re-derivation.

use tro::harness::truth::{configured, newsvendor_exact, rederive};
use tro::harness::ProblemKind;
use tro::objective::NewsvendorParams;
use tro::solvers::SolverConfig;

fn main() -> tro::Result<()> {
    let exact = newsvendor_exact(&NewsvendorParams::default(), 50.0);
    println!("newsvendor closed form: profit {:.3}, x⋆ = {:.3}, V⋆ = {:.1}", -exact.v_star, exact.x_star[0], exact.v_star_variance);
    for p in [ProblemKind::Newsvendor, ProblemKind::Portfolio] {
        let c = configured(p);
        let r = rederive(p, 100_000, 3, 1, &SolverConfig::default())?;
        println!("{p}: configured v⋆ = {:.4}; SAA N=1e5 × 3 seeds: v⋆ ≈ {:.4}, x⋆ ≈ {:?}", c.v_star, r.v_star, r.x_star);
    }
    Ok(())
}
