//! The headline effect: on-off detectors with naive postprocessing push the
//! CHSH Bell parameter beyond the quantum bound 2√2.
//!
//! Multi-pair emissions make both detectors of a site click; discarding
//! those events skews the remaining coincidences enough to fake a violation
//! of quantum theory. Nothing nonphysical happens — the postprocessing is
//! simply inconsistent.
//!
//! Run: `cargo run --release --example fake_violation`

use fakebell::chsh::maximize_bell;
use fakebell::detector::{DetectorParams, PostprocessingModel};
use fakebell::fock::PdcSource;

fn main() -> fakebell::Result<()> {
    let bound = 2.0 * std::f64::consts::SQRT_2;
    println!("quantum bound: 2√2 = {bound:.9}\n");

    let params = DetectorParams::ideal();
    for &tanh_chi in &[0.05, 0.2, 0.35, 0.5, 0.65] {
        let source = PdcSource::new(tanh_chi)?;
        let result = maximize_bell(&source, &params, PostprocessingModel::NaiveOnOff)?;
        let marker = if result.bell_value > bound { "  <-- fake violation" } else { "" };
        println!(
            "tanh χ = {tanh_chi:4}: B_max = {:.9}{marker}",
            result.bell_value
        );
    }

    let source = PdcSource::new(0.5)?;
    let result = maximize_bell(&source, &params, PostprocessingModel::NaiveOnOff)?;
    let s = result.settings;
    println!("\nat tanh χ = 0.5 the optimum uses analyzer angles");
    println!(
        "  θ_A ∈ {{{:.6}, {:.6}}}, θ_B ∈ {{{:.6}, {:.6}}}",
        s.theta_a1, s.theta_a2, s.theta_b1, s.theta_b2
    );
    println!(
        "  correlations E11 = {:.6}, E12 = {:.6}, E21 = {:.6}, E22 = {:.6}",
        result.correlations[0],
        result.correlations[1],
        result.correlations[2],
        result.correlations[3]
    );
    println!(
        "  B = {:.9}, exceeding 2√2 by {:.4}",
        result.bell_value,
        result.bell_value - bound
    );
    Ok(())
}
