//! Photon-number-resolving detectors avoid the fake violation: postselecting
//! on exactly one registered count per site is insensitive to the multi-pair
//! events that naive on-off postprocessing mishandles, and the resulting
//! Bell parameter is consistently the smaller of the two.
//!
//! Run: `cargo run --release --example pnr_comparison`

use fakebell::chsh::maximize_bell;
use fakebell::detector::{DetectorParams, PostprocessingModel};
use fakebell::fock::PdcSource;

fn main() -> fakebell::Result<()> {
    let bound = 2.0 * std::f64::consts::SQRT_2;
    println!("η = 0.9, mean noise counts 1e-6\n");
    println!(
        "{:>8} {:>16} {:>16} {:>10}",
        "tanh χ", "on-off B_max", "number-res B_max", "gap"
    );
    let params = DetectorParams::new(0.9, 1e-6)?;
    for &tanh_chi in &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        let source = PdcSource::new(tanh_chi)?;
        let onoff = maximize_bell(&source, &params, PostprocessingModel::NaiveOnOff)?;
        let pnr = maximize_bell(&source, &params, PostprocessingModel::PhotonNumberResolving)?;
        println!(
            "{tanh_chi:>8} {:>16.9} {:>16.9} {:>10.2e}",
            onoff.bell_value,
            pnr.bell_value,
            onoff.bell_value - pnr.bell_value
        );
    }
    println!("\nquantum bound 2√2 = {bound:.9}: the on-off column crosses it, the");
    println!("number-resolving column does not.");
    Ok(())
}
