//! Pointwise hypothesis to Poincaré conclusion on sampled grids, with an
//! independent audit of every certificate.
//!
//! `cargo run --release --example grid_certificate -- 8 16 32`

use std::time::Instant;

use bvcert::fixtures::{grid_graph, sine_bump};
use bvcert::prelude::*;

fn main() -> Result<()> {
    let sizes: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let sizes = if sizes.is_empty() { vec![8, 16] } else { sizes };
    let sigma = 2.0;
    for n in sizes {
        let start = Instant::now();
        let space = grid_graph(n);
        let u = sine_bump(&space);
        let nu = variation_measure(&space, &u, VariationMode::Grid)?;
        let pointwise = check_pointwise(&space, &u, &nu, sigma, None)?;
        let cert = poincare_from_pointwise(
            &space,
            &u,
            &nu,
            pointwise.c0_minimal,
            sigma,
            &AuditSelection::Default,
        )?;
        let failing = cert.traces.iter().filter(|t| !t.passed()).count();
        let elapsed = start.elapsed();
        let text = to_json(&cert);
        let audit = audit_certificate(&text)?;
        println!(
            "n = {n:>2}: C0 = {:.4}, C = {:.4}, traces = {} ({failing} failing), passed = {}, audit agreed = {} ({} checks), {:.2?} + audit {:.2?}",
            pointwise.c0_minimal,
            cert.overall_constant,
            cert.traces.len(),
            cert.passed,
            audit.agreed,
            audit.checks,
            elapsed,
            start.elapsed() - elapsed,
        );
        for d in audit.discrepancies.iter().take(5) {
            println!("  {d}");
        }
        if let Some(t) = cert.traces.iter().find(|t| !t.passed()) {
            println!(
                "  first failing trace: center {} radius {} flags {:?}",
                t.ball.center, t.ball.radius, t.verified
            );
        }
    }
    Ok(())
}
