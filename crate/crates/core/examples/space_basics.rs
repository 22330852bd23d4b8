//! Loading a space document, distance shells and the realizable balls.
//!
//! `cargo run --example space_basics -- crates/core/examples/data/s2.json`

use bvcert::prelude::*;

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/square4.json").into()
    });
    let text = std::fs::read_to_string(&path)?;
    let doc = load_document(&text)?;
    let s = &doc.space;
    println!(
        "{}: n = {}, total mass {}, diameter {:.4}",
        s.name(),
        s.n(),
        s.total_mass(),
        s.diameter()
    );

    for x in 0..s.n().min(3) {
        let radii = candidate_radii(s, x, f64::INFINITY)?;
        print!("  center {x}:");
        for t in radii {
            // the open ball just above the shell radius
            let b = ball(s, x, t + 1e-9)?;
            print!(" {{d <= {t:.3}}} = {:?}", b.members);
        }
        println!();
    }

    if !s.is_length_metric() {
        let rho = length_metric(s)?;
        println!(
            "length metric: d(0, 2) = {:.4} -> {:.4}",
            s.dist(0, 2),
            rho.dist(0, 2)
        );
    }
    Ok(())
}
