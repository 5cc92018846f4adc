//! Sweep the maximal Bell parameter over the interaction strength and write
//! a CSV artifact plus a companion plot script, for all three postprocessing
//! models at realistic detector parameters.
//!
//! Run: `cargo run --release --example bell_sweep`
//! Then: `python3 bell_sweep_onoff-naive.csv.plot.py` (needs matplotlib)

use std::path::PathBuf;

use fakebell::detector::PostprocessingModel;
use fakebell::sweep::{sweep_bell, CutoffSpec, RunConfig, TanhChiRange};

fn main() -> fakebell::Result<()> {
    for model in PostprocessingModel::ALL {
        let out = PathBuf::from(format!("bell_sweep_{}.csv", model.id()));
        let config = RunConfig {
            model,
            eta: 0.9,
            n_nc: 1e-6,
            range: TanhChiRange {
                start: 0.05,
                stop: 0.65,
                step: 0.05,
            },
            cutoff: CutoffSpec::Auto,
            basis: None,
            basis_label: String::new(),
            out: out.clone(),
            workers: None,
        };
        let rows = sweep_bell(&config)?;
        let peak = rows
            .iter()
            .max_by(|a, b| a.result.bell_value.total_cmp(&b.result.bell_value))
            .unwrap();
        println!(
            "{}: {} points -> {} (peak B = {:.6} at tanh χ = {})",
            model.id(),
            rows.len(),
            out.display(),
            peak.result.bell_value,
            peak.tanh_chi
        );
    }
    println!("\neach CSV has a sibling .plot.py that renders the curve.");
    Ok(())
}
