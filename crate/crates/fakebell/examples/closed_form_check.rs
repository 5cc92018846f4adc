//! Cross-check the analytic formulas against the Fock-space pipeline.
//!
//! The on-off coincidence probability has an exact closed form that must
//! agree with the pipeline to near machine precision. The squash-correlation
//! closed form is different: its transcription diverges for weak interaction
//! and is reported rather than asserted — the pipeline is the reference.
//!
//! Run: `cargo run --release --example closed_form_check`

use fakebell::validation::{audit_squash_closed_form, compare_onoff_closed_form, ONOFF_REL_TOL};

fn main() -> fakebell::Result<()> {
    let comparison = compare_onoff_closed_form()?;
    println!("on-off closed form vs pipeline over the standard grid:");
    println!("  comparisons:            {}", comparison.comparisons);
    println!(
        "  max relative deviation: {:.3e}  (tolerance {ONOFF_REL_TOL:.0e})",
        comparison.max_relative_deviation
    );
    assert!(comparison.passed());
    println!("  agreement holds.\n");

    println!("squash correlation closed form (informational audit):");
    println!(
        "{:>10} {:>10} {:>14} {:>14} {:>12}",
        "tanh χ", "Δ", "pipeline E", "closed form", "|gap|"
    );
    let rows = audit_squash_closed_form()?;
    for row in rows.iter().filter(|r| {
        (r.delta - std::f64::consts::FRAC_PI_8).abs() < 1e-12
            && (r.weak_interaction_regime
                || (r.tanh_chi - 0.3).abs() < 1e-9
                || (r.tanh_chi - 0.7).abs() < 1e-9)
    }) {
        println!(
            "{:>10} {:>10.4} {:>14.6} {:>14.6} {:>12.3e}{}",
            row.tanh_chi,
            row.delta,
            row.pipeline_e,
            row.closed_form_e,
            row.abs_deviation,
            if row.weak_interaction_regime {
                "   <-- transcription diverges here"
            } else {
                ""
            }
        );
    }
    println!("\nthe transcribed denominator grows like 4/tanh²χ for weak interaction,");
    println!("so its correlation drains to zero while the pipeline approaches the");
    println!("one-pair value -cos 2Δ. Downstream results use the pipeline.");
    Ok(())
}
