//! The pointwise hypothesis, its Sobolev variant, and a single proof trace.

use bvcert::fixtures::{path_graph, two_point};
use bvcert::prelude::*;

fn main() -> Result<()> {
    let s = two_point();
    let u = ScalarField::new(vec![0.0, 2.0])?;
    let nu = PointMeasure::new(vec![1.0, 1.0])?;
    let r = check_pointwise(&s, &u, &nu, 1.0, None)?;
    println!("two points: c0 minimal = {}", r.c0_minimal);
    let r = check_pointwise(&s, &u, &PointMeasure::zero(2), 1.0, Some(1.0))?;
    let w = r.worst_pair.expect("a violating pair");
    println!(
        "zero measure: passed = {}, worst pair ({}, {})",
        r.passed,
        s.label(w.x),
        s.label(w.y)
    );

    let p = path_graph(5, 1.0);
    let u = ScalarField::from_fn(5, |i| i as f64);
    for gain in [1.0, 2.0] {
        let g = ScalarField::constant(5, gain);
        let r = check_sobolev_pointwise(&p, &u, &g, 2.0, 1.0)?;
        println!("path, g = {gain}: Sobolev c0 minimal = {}", r.c0_minimal);
    }

    let t = build_proof_trace(
        &s,
        &ScalarField::new(vec![0.0, 2.0])?,
        &nu,
        1.0,
        1.0,
        ball(&s, 0, 1.5)?,
    )?;
    println!(
        "trace on B(a, 1.5): k0 = {:?}, levels = {}, passed = {}",
        t.k0,
        t.levels.len(),
        t.passed()
    );
    for l in &t.levels {
        println!(
            "  k = {:>2}: |E_k| = {}, a_k = {}, r_k = {:.3}",
            l.k, l.count, l.sup, l.radius
        );
    }
    println!(
        "  {} <= 2 * {} <= {:.3}",
        t.final_lhs, t.level_sum, t.final_rhs
    );
    Ok(())
}
