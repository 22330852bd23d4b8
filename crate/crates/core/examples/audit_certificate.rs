//! Builds a certificate, audits it, then tampers with one trace value and
//! audits again.

use bvcert::fixtures::{grid_graph, sine_bump};
use bvcert::prelude::*;

fn main() -> Result<()> {
    let s = grid_graph(8);
    let u = sine_bump(&s);
    let nu = variation_measure(&s, &u, VariationMode::Grid)?;
    let c0 = check_pointwise(&s, &u, &nu, 2.0, None)?.c0_minimal;
    let cert = poincare_from_pointwise(&s, &u, &nu, c0, 2.0, &AuditSelection::Worst(4))?;
    let text = to_json(&cert);

    let clean = audit_certificate(&text)?;
    println!(
        "original: agreed = {}, {} traces, {} checks",
        clean.agreed, clean.traces_checked, clean.checks
    );

    let mut doc: serde_json::Value = serde_json::from_str(&text)?;
    let level_sum = doc["traces"][0]["level_sum"].as_f64().unwrap_or(0.0);
    doc["traces"][0]["level_sum"] = serde_json::json!(level_sum * 1.1);
    let tampered = audit_certificate(&doc.to_string())?;
    println!(
        "tampered: agreed = {}, {} discrepancies",
        tampered.agreed, tampered.discrepancy_count
    );
    for d in tampered.discrepancies.iter().take(3) {
        println!("  {d}");
    }
    Ok(())
}
