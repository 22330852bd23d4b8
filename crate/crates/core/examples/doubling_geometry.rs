//! Doubling constant and dimension, quasiconvexity, and the geodesic ball
//! lemma with its volume bound on a grid graph.

use bvcert::fixtures::{cycle, grid_graph, path_graph, square};
use bvcert::prelude::*;

fn main() -> Result<()> {
    for s in [path_graph(10, 1.0), cycle(12), grid_graph(10), square()] {
        let g = geometry_report(&s, true);
        println!(
            "{:<10} c_d = {:.3}, dimension = {:.3}, quasiconvexity = {:?}, covering = {:.3}",
            s.name(),
            g.doubling_constant,
            g.doubling_dimension,
            g.quasiconvexity_constant,
            g.covering_constant
        );
    }

    let s = grid_graph(10);
    let mesh = 0.1;
    let cd = doubling_constant(&s);
    let (x0, big_r, x, r) = (0, 0.55, 22, 0.4);
    let out = check_geodesic_lemma(&s, x0, big_r, x, r, mesh)?;
    let w = out.witness.expect("witness within one mesh step");
    println!(
        "lemma: {:?} branch, ball around {} of radius {:.2} with {} points",
        out.branch,
        w.center,
        w.radius,
        w.members.len()
    );
    let sb = small_ball_bound(&s, x0, big_r, x, r, cd, cd.log2());
    println!("small ball: {:.4} >= {:.4} ({})", sb.lhs, sb.rhs, sb.holds);
    Ok(())
}
