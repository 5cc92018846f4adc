//! Expand the down-conversion source into pair-number blocks.
//!
//! Shows the block weights, the adaptive cutoff the engine picks for a given
//! tail tolerance, and how the neglected weight shrinks with the cutoff.
//!
//! Run: `cargo run --release --example pdc_state`

use fakebell::fock::{build_pdc_state, CutoffPolicy, PdcSource};

fn main() -> fakebell::Result<()> {
    for &tanh_chi in &[0.1, 0.5, 0.7] {
        let source = PdcSource::new(tanh_chi)?;
        let blocks = build_pdc_state(&source)?;
        println!("tanh χ = {tanh_chi}");
        println!("  adaptive cutoff keeps {} blocks", blocks.len());
        println!(
            "  neglected weight: {:.3e}",
            source.truncation_deficit(blocks.len() - 1)
        );
        for block in blocks.iter().take(5) {
            println!(
                "  block n = {}: weight {:.6}, {} amplitudes",
                block.pair_number(),
                block.weight(),
                block.dim() * block.dim()
            );
        }
        if blocks.len() > 5 {
            let rest: f64 = blocks.iter().skip(5).map(|b| b.weight()).sum();
            println!("  blocks n ≥ 5 carry {rest:.3e} total");
        }
        println!();
    }

    // A fixed cutoff trades accuracy for speed explicitly.
    let coarse = PdcSource::with_cutoff(0.7, CutoffPolicy::Fixed(8))?;
    println!(
        "fixed cutoff 8 at tanh χ = 0.7 discards {:.3e} of the weight",
        coarse.truncation_deficit(8)
    );
    Ok(())
}
