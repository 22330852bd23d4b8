//! Variation measures, upper gradients and the ball-wise Poincaré constant.

use bvcert::fixtures::{grid_graph, sample_grid};
use bvcert::prelude::*;

fn main() -> Result<()> {
    let s = grid_graph(16);
    let smooth = sample_grid(&s, |x, y| x * x + y);
    let jump = sample_grid(&s, |x, _| if x < 0.5 { 0.0 } else { 1.0 });

    for (name, u) in [("smooth", &smooth), ("jump", &jump)] {
        let graph = total_variation(&s, u, VariationMode::Graph)?;
        let grid = total_variation(&s, u, VariationMode::Grid)?;
        let nu = variation_measure(&s, u, VariationMode::Grid)?;
        let p = check_ball_poincare(&s, u, &nu, 2.0, false)?;
        let w = p.worst_ball.as_ref().expect("nonempty space");
        println!(
            "{name:<6}: |Du| graph {graph:.4}, grid {grid:.4}; Poincaré C = {:.4} at B({}, {:.4})",
            p.minimal_constant, w.center, w.radius
        );
    }

    // 2x covers the slope in x but not the unit slope in y
    let g = sample_grid(&s, |x, _| 2.0 * x);
    let check = upper_gradient_check(&s, &smooth, &g, 4)?;
    println!(
        "upper gradient 2x: passed = {}, {} pairs",
        check.passed, check.pairs
    );
    if let Some(v) = check.violation {
        println!("  violated along {:?}", v.path);
    }
    Ok(())
}
