//! Consistent postprocessing removes the fake violation: assigning
//! double-click events to the two outcomes with probability 1/2 each maps
//! the optical state onto a well-defined qubit measurement, and the Bell
//! parameter drops back below 2√2.
//!
//! Run: `cargo run --release --example squash_restores_bound`

use fakebell::chsh::maximize_bell;
use fakebell::detector::{DetectorParams, PostprocessingModel};
use fakebell::fock::PdcSource;

fn main() -> fakebell::Result<()> {
    let bound = 2.0 * std::f64::consts::SQRT_2;
    let params = DetectorParams::ideal();
    println!("ideal on-off detectors, η = 1, no noise counts\n");
    println!("{:>8} {:>16} {:>16}", "tanh χ", "naive B_max", "squash B_max");
    let mut worst = f64::NEG_INFINITY;
    for &tanh_chi in &[0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65] {
        let source = PdcSource::new(tanh_chi)?;
        let naive = maximize_bell(&source, &params, PostprocessingModel::NaiveOnOff)?;
        let squash = maximize_bell(&source, &params, PostprocessingModel::SquashOnOff)?;
        worst = worst.max(squash.bell_value);
        println!(
            "{tanh_chi:>8} {:>16.9} {:>16.9}",
            naive.bell_value, squash.bell_value
        );
    }
    println!("\nlargest squash value: {worst:.9} (bound 2√2 = {bound:.9})");
    assert!(worst <= bound + 1e-9);
    println!("the squash model never exceeds the bound.");
    Ok(())
}
