//! Cross-checks between the analytic formulas and the Fock-space pipeline on
//! a fixed parameter grid, backing both the `validate` command and the
//! acceptance suite.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::closed_form::{onoff_probability, squash_correlation_closed_form};
use crate::detector::{
    coincidence_probabilities, Channel, DetectorParams, PostprocessingModel,
};
use crate::error::Result;
use crate::fock::{joint_photon_distribution, AnalyzerSetting, PdcSource};

/// Interaction strengths of the standard grid: 0.05, 0.10, …, 0.70.
pub fn standard_tanh_chi() -> Vec<f64> {
    (1..=14).map(|k| k as f64 * 0.05).collect()
}

/// Efficiencies of the standard grid.
pub const STANDARD_ETA: [f64; 4] = [0.4, 0.6, 0.9, 1.0];

/// Mean noise counts of the standard grid.
pub const STANDARD_NOISE: [f64; 3] = [0.0, 1e-6, 1e-3];

/// Analyzer-angle differences of the standard grid: 0, π/16, …, π/2.
pub fn standard_deltas() -> Vec<f64> {
    (0..=8).map(|k| k as f64 * PI / 16.0).collect()
}

/// Relative tolerance for the on-off closed-form comparison.
pub const ONOFF_REL_TOL: f64 = 1e-8;
/// Absolute floor below which deviations are ignored.
pub const ONOFF_ABS_FLOOR: f64 = 1e-14;

/// Tail tolerance for the comparison runs. The analytic formulas sum the
/// whole pair-number series, so the pipeline's truncation must sit below the
/// absolute floor or it would read as disagreement at the smallest
/// probabilities on the grid.
const COMPARISON_TAIL_TOLERANCE: f64 = 1e-16;

/// Worst deviation between the analytic on-off probability and the pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnOffComparison {
    /// Largest relative deviation over the grid (after the absolute floor).
    pub max_relative_deviation: f64,
    /// Grid point attaining it: `(tanh_chi, eta, n_nc, delta)`.
    pub worst_point: (f64, f64, f64, f64),
    /// Pipeline and analytic values at the worst point.
    pub worst_values: (f64, f64),
    /// Number of probability comparisons performed.
    pub comparisons: usize,
}

impl OnOffComparison {
    /// Whether the whole grid met the agreement tolerance.
    pub fn passed(&self) -> bool {
        self.max_relative_deviation < ONOFF_REL_TOL
    }
}

/// Run the analytic-vs-pipeline comparison for naive on-off postprocessing
/// over the standard grid. The photon distribution for a `(tanh_chi, Δ)` pair
/// is shared across all detector parameters.
pub fn compare_onoff_closed_form() -> Result<OnOffComparison> {
    let tanh_chis = standard_tanh_chi();
    let deltas = standard_deltas();
    let pairs: Vec<(f64, f64)> = tanh_chis
        .iter()
        .flat_map(|&t| deltas.iter().map(move |&d| (t, d)))
        .collect();

    let per_pair: Vec<Result<OnOffComparison>> = pairs
        .par_iter()
        .map(|&(tanh_chi, delta)| {
            let source = PdcSource::with_cutoff(
                tanh_chi,
                crate::fock::CutoffPolicy::Adaptive {
                    tail_tolerance: COMPARISON_TAIL_TOLERANCE,
                },
            )?;
            let dist = joint_photon_distribution(
                &source,
                &AnalyzerSetting::new(delta),
                &AnalyzerSetting::new(0.0),
            )?;
            let mut local = OnOffComparison::default();
            for &eta in &STANDARD_ETA {
                for &n_nc in &STANDARD_NOISE {
                    let params = DetectorParams::new(eta, n_nc)?;
                    let oracle =
                        coincidence_probabilities(&dist, &params, PostprocessingModel::NaiveOnOff);
                    for (pair, oracle_p) in [
                        ((Channel::Transmitted, Channel::Transmitted), oracle.tt),
                        ((Channel::Transmitted, Channel::Reflected), oracle.tr),
                        ((Channel::Reflected, Channel::Transmitted), oracle.rt),
                        ((Channel::Reflected, Channel::Reflected), oracle.rr),
                    ] {
                        let analytic =
                            onoff_probability(tanh_chi, eta, n_nc, delta, 0.0, pair)?;
                        let diff = (analytic - oracle_p).abs();
                        let rel = if diff <= ONOFF_ABS_FLOOR {
                            0.0
                        } else {
                            diff / oracle_p.abs().max(ONOFF_ABS_FLOOR)
                        };
                        local.comparisons += 1;
                        if rel > local.max_relative_deviation {
                            local.max_relative_deviation = rel;
                            local.worst_point = (tanh_chi, eta, n_nc, delta);
                            local.worst_values = (oracle_p, analytic);
                        }
                    }
                }
            }
            Ok(local)
        })
        .collect();

    let mut total = OnOffComparison::default();
    for local in per_pair {
        let local = local?;
        total.comparisons += local.comparisons;
        if local.max_relative_deviation > total.max_relative_deviation {
            total.max_relative_deviation = local.max_relative_deviation;
            total.worst_point = local.worst_point;
            total.worst_values = local.worst_values;
        }
    }
    Ok(total)
}

/// One row of the squash-correlation audit.
#[derive(Debug, Clone, Copy)]
pub struct SquashAuditRow {
    /// Interaction strength.
    pub tanh_chi: f64,
    /// Analyzer-angle difference.
    pub delta: f64,
    /// Pipeline correlation (authoritative).
    pub pipeline_e: f64,
    /// Literal transcription of the analytic squash correlation.
    pub closed_form_e: f64,
    /// Absolute deviation between the two.
    pub abs_deviation: f64,
    /// Marks the weak-interaction regime where the transcription collapses
    /// toward zero while the pipeline approaches the one-pair correlation.
    pub weak_interaction_regime: bool,
}

/// Audit the analytic squash correlation against the pipeline at unit
/// efficiency and no noise. The report is informational: the transcribed
/// denominator diverges for weak interaction, so agreement is not asserted
/// anywhere; the pipeline side is the reference for downstream results.
pub fn audit_squash_closed_form() -> Result<Vec<SquashAuditRow>> {
    let mut tanh_chis = vec![1e-3, 0.01];
    tanh_chis.extend(standard_tanh_chi());
    let deltas: Vec<f64> = vec![PI / 16.0, PI / 8.0, 3.0 * PI / 16.0, 5.0 * PI / 16.0];

    let rows: Vec<Result<Vec<SquashAuditRow>>> = tanh_chis
        .par_iter()
        .map(|&tanh_chi| {
            let source = PdcSource::new(tanh_chi)?;
            let params = DetectorParams::ideal();
            let mut out = Vec::with_capacity(deltas.len());
            for &delta in &deltas {
                let dist = joint_photon_distribution(
                    &source,
                    &AnalyzerSetting::new(delta),
                    &AnalyzerSetting::new(0.0),
                )?;
                let probs =
                    coincidence_probabilities(&dist, &params, PostprocessingModel::SquashOnOff);
                let pipeline_e = crate::chsh::correlation(&probs)?;
                let closed_form_e = squash_correlation_closed_form(tanh_chi, delta, 0.0)?;
                out.push(SquashAuditRow {
                    tanh_chi,
                    delta,
                    pipeline_e,
                    closed_form_e,
                    abs_deviation: (pipeline_e - closed_form_e).abs(),
                    weak_interaction_regime: tanh_chi < 0.05,
                });
            }
            Ok(out)
        })
        .collect();

    let mut flat = Vec::new();
    for rows in rows {
        flat.extend(rows?);
    }
    Ok(flat)
}
