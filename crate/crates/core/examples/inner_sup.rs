//! Worst-case expectations sup_{P ∈ P_N} E_P f for every set kind, next to the
//! sample average they dominate.

use tro::ambiguity::{build_table1, build_table2, SetKind, Table1Params, Table2Params};
use tro::distributions::{sample, GroundTruth};
use tro::objective::PortfolioParams;
use tro::reformulations::{nv_inner_sup, nv_saa, pf_inner_sup, pf_saa};

fn main() -> tro::Result<()> {
    let demand = sample(&GroundTruth::newsvendor_default(), 10, 3)?;
    let x = 80.0;
    println!("newsvendor, x = {x}: SAA E[(ξ−x)₊ − ξ] = {:.4}", nv_saa(x, &demand));
    for kind in [SetKind::MeanVariance, SetKind::Wasserstein, SetKind::Burg, SetKind::ConfidenceInterval] {
        let sp = build_table1(&demand, kind, &Table1Params::default())?;
        let v = nv_inner_sup(&sp, x, &demand)?;
        println!("  {:<20} sup = {:>10.4}   {:?}", kind.name(), v.value, v.info);
    }

    let returns = sample(&GroundTruth::portfolio_default(), 10, 3)?;
    let params = PortfolioParams::for_samples(&returns);
    let (w, t) = (vec![0.25; 4], 0.05);
    println!("portfolio, equal weights, t = {t}: SAA = {:.5}", pf_saa(&params, &w, t, &returns));
    for kind in [SetKind::MeanVariance, SetKind::Wasserstein, SetKind::TotalVariation] {
        let sp = build_table2(&returns, kind, &Table2Params::default())?;
        println!("  {:<20} sup = {:.5}", kind.name(), pf_inner_sup(&sp, &w, t, &params, &returns)?.value);
    }
    Ok(())
}
