//! Restricted maximal functions of a field and of a measure, and the
//! weak-type estimate for the measure version.

use bvcert::fixtures::{grid_graph, sine_bump};
use bvcert::maximal::superlevel_mass;
use bvcert::prelude::*;

fn main() -> Result<()> {
    let s = grid_graph(12);
    let u = sine_bump(&s);
    let nu = variation_measure(&s, &u, VariationMode::Grid)?;

    let table = MaximalTable::of_function(&s, &u);
    for r_max in [0.1, 0.3, f64::INFINITY] {
        let mu = maximal_function(&s, &u, r_max)?;
        let mnu = maximal_function_measure(&s, &nu, r_max)?;
        let top = |f: &ScalarField| f.values().iter().copied().fold(0.0, f64::max);
        println!(
            "R = {r_max:<5}: max M u = {:.4}, max M nu = {:.4}, M u(0) = {:.4}",
            top(&mu),
            top(&mnu),
            table.query(&s, 0, r_max)
        );
    }

    let cw = weak_type_constant(&s);
    let m = maximal_function_measure(&s, &nu, f64::INFINITY)?;
    println!("covering constant C_w = {cw}");
    for t in [0.5, 1.0, 2.0, 4.0] {
        let lhs = superlevel_mass(&s, &m, t);
        println!(
            "  t = {t}: mu(M nu > t) = {lhs:.4} <= {:.4}",
            cw * nu.total() / t
        );
    }
    Ok(())
}
