//! The detector outcome model: registered-count distributions for a given
//! photon number under efficiency loss and Poissonian noise counts.
//!
//! Run: `cargo run --release --example detector_response`

use fakebell::detector::{click_probability, detector_response, DetectorParams};

fn main() -> fakebell::Result<()> {
    let params = DetectorParams::new(0.6, 0.05)?;
    println!(
        "detector: η = {}, mean noise counts = {}",
        params.eta(),
        params.noise_counts()
    );
    println!("\np(n counts | m photons):");
    print!("{:>12}", "m \\ n");
    for n in 0..6 {
        print!("{n:>12}");
    }
    println!();
    for m in 0..6 {
        print!("{m:>12}");
        let mut total = 0.0;
        for n in 0..6 {
            let p = detector_response(m, n, &params);
            total += p;
            print!("{p:>12.6}");
        }
        println!("   (first 6 sum to {total:.6})");
    }

    println!("\nclick probability 1 - p(0 | m):");
    for m in 0..6 {
        println!("  m = {m}: {:.6}", click_probability(m, &params));
    }

    // Noise counts alone can click a detector.
    let dark_only = DetectorParams::new(0.0, 0.05)?;
    println!(
        "\nwith η = 0 the click probability is noise-only: {:.6} (= 1 - e^(-0.05))",
        click_probability(3, &dark_only)
    );
    Ok(())
}
