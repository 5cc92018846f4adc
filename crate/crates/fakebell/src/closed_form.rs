//! Analytic coincidence and correlation formulas for the down-conversion
//! state, used as a fast path and as an independent cross-check of the
//! Fock-space pipeline.
//!
//! The on-off coincidence probability is evaluated through four coefficients
//! `c0`, `c1`, `c_same`, `c_different` that depend on the interaction
//! strength, the efficiency, and only the *difference* of the analyzer
//! angles. Wherever the analytic value and the pipeline disagree beyond
//! tolerance, the pipeline is authoritative; see [`crate::validation`].

use crate::detector::Channel;
use crate::error::{Error, Result};

/// Denominators this small are treated as degenerate rather than divided by.
const DENOMINATOR_FLOOR: f64 = 1e-300;

/// Coefficients of the analytic on-off coincidence probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffCoefficients {
    /// Angle-independent base coefficient (a perfect square, hence ≥ 0).
    pub c0: f64,
    /// Loss cross-term; vanishes at unit efficiency.
    pub c1: f64,
    /// Coefficient for same-kind channel pairs (TT and RR).
    pub c_same: f64,
    /// Coefficient for opposite-kind channel pairs (TR and RT).
    pub c_different: f64,
}

impl OnOffCoefficients {
    /// Evaluate the coefficients at interaction strength `tanh_chi`,
    /// efficiency `eta`, and analyzer-angle difference `delta`.
    pub fn new(tanh_chi: f64, eta: f64, delta: f64) -> Self {
        let t2 = tanh_chi * tanh_chi;
        let base = eta * eta * t2 - (1.0 + (eta - 1.0) * t2).powi(2);
        let c0 = base * base;
        let c1 = eta * (1.0 - eta) * (1.0 - t2) * t2 * base;
        let angle_free = (1.0 - eta) * (1.0 - eta) * t2;
        let shared = eta * eta * t2 * (1.0 - t2) * (1.0 - t2);
        let c_same = shared * (angle_free - delta.sin().powi(2));
        let c_different = shared * (angle_free - delta.cos().powi(2));
        Self {
            c0,
            c1,
            c_same,
            c_different,
        }
    }

    fn for_pair(&self, pair: (Channel, Channel)) -> f64 {
        match pair {
            (Channel::Transmitted, Channel::Transmitted)
            | (Channel::Reflected, Channel::Reflected) => self.c_same,
            _ => self.c_different,
        }
    }
}

fn validate_onoff_inputs(tanh_chi: f64, eta: f64, n_nc: f64) -> Result<()> {
    if !tanh_chi.is_finite() || !(0.0..1.0).contains(&tanh_chi) {
        return Err(Error::InvalidParameter(format!(
            "tanh_chi must lie in [0, 1), got {tanh_chi}"
        )));
    }
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "efficiency must lie in [0, 1], got {eta}"
        )));
    }
    if !n_nc.is_finite() || n_nc < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mean noise counts must be non-negative, got {n_nc}"
        )));
    }
    Ok(())
}

/// Analytic coincidence probability for one detector pair under naive on-off
/// postprocessing:
///
/// ```text
/// P = (1 - t²)⁴ [ e^{-2 N_nc}/(c0 + 2 c1 + c_pair)
///               - 2 e^{-3 N_nc}/(c0 + c1)
///               + e^{-4 N_nc}/c0 ]
/// ```
///
/// The bracket is an inclusion-exclusion over silent channels: the first
/// term demands zero counts on the two opposite channels, the next subtracts
/// the events where a target channel is silent as well (equal for either
/// target by the source's site symmetry), and the last restores joint
/// silence of all four. Every silenced channel contributes one `e^{-N_nc}`
/// no-noise factor, and `(1 - t²)² / c_group` is the corresponding loss
/// generating function — efficiency enters only through the coefficients.
/// The angles enter only through `theta_a - theta_b`.
pub fn onoff_probability(
    tanh_chi: f64,
    eta: f64,
    n_nc: f64,
    theta_a: f64,
    theta_b: f64,
    pair: (Channel, Channel),
) -> Result<f64> {
    validate_onoff_inputs(tanh_chi, eta, n_nc)?;
    let coeffs = OnOffCoefficients::new(tanh_chi, eta, theta_a - theta_b);
    let c_pair = coeffs.for_pair(pair);
    let d_full = coeffs.c0 + 2.0 * coeffs.c1 + c_pair;
    let d_half = coeffs.c0 + coeffs.c1;
    for (name, value) in [("c0", coeffs.c0), ("c0 + c1", d_half), ("c0 + 2 c1 + c_pair", d_full)] {
        if value.abs() < DENOMINATOR_FLOOR {
            return Err(Error::DegenerateDenominator(format!(
                "{name} = {value:e} at tanh_chi = {tanh_chi}, eta = {eta}"
            )));
        }
    }
    let t2 = tanh_chi * tanh_chi;
    let prefactor = (1.0 - t2).powi(4);
    let silent = (-n_nc).exp();
    let bracket = silent.powi(2) / d_full - 2.0 * silent.powi(3) / d_half
        + silent.powi(4) / coeffs.c0;
    Ok(prefactor * bracket)
}

/// Analytic correlation coefficient under the squash postprocessing for ideal
/// detectors (unit efficiency, no noise counts): `E = -cos[2(θ_A - θ_B)] / D`
/// with the denominator transcribed literally as the sum of four terms
///
/// ```text
/// D = 1 - (1/2) t² sin²(2Δ)
///   + (9 + 3(1 - t²)) / (2 t² (1 - t²)²) · [1 - t² + (1/4) t⁴ sin²(2Δ)]
///   + (1 - 2 (1 - t²)²)(2 - t²) / (t² (1 - t²)²)
/// ```
///
/// The expression diverges as `tanh_chi → 0` (the last two terms leave a net
/// `4/t²`), driving `E → 0` where the Fock-space pipeline produces the
/// one-pair value `-cos 2Δ`. The pipeline is the reference; this transcription
/// is retained for the audit report. Singular at `tanh_chi = 0`.
pub fn squash_correlation_closed_form(tanh_chi: f64, theta_a: f64, theta_b: f64) -> Result<f64> {
    if !tanh_chi.is_finite() || tanh_chi <= 0.0 || tanh_chi >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "squash closed form needs tanh_chi in (0, 1), got {tanh_chi}"
        )));
    }
    let t2 = tanh_chi * tanh_chi;
    let one_m = 1.0 - t2;
    let sin2 = (2.0 * (theta_a - theta_b)).sin().powi(2);
    let denom = 1.0 - 0.5 * t2 * sin2
        + (9.0 + 3.0 * one_m) / (2.0 * t2 * one_m * one_m) * (one_m + 0.25 * t2 * t2 * sin2)
        + (1.0 - 2.0 * one_m * one_m) * (2.0 - t2) / (t2 * one_m * one_m);
    Ok(-(2.0 * (theta_a - theta_b)).cos() / denom)
}

/// Analytic coincidence probability for photon-number-resolving detectors.
///
/// The required single-channel coefficients have no available derivation, so
/// this always reports [`Error::PnrClosedFormUnavailable`]; use
/// [`crate::detector::coincidence_probabilities`] with
/// [`crate::detector::PostprocessingModel::PhotonNumberResolving`] instead.
pub fn pnr_probability_closed_form(
    _tanh_chi: f64,
    _eta: f64,
    _n_nc: f64,
    _theta_a: f64,
    _theta_b: f64,
    _pair: (Channel, Channel),
) -> Result<f64> {
    Err(Error::PnrClosedFormUnavailable)
}
