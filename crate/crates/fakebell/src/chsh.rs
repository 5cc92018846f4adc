//! Correlation coefficients and the CHSH Bell parameter, with angle
//! optimization over the analyzer settings.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::detector::{
    coincidence_probabilities, CoincidenceProbabilities, DetectorParams, PostprocessingModel,
};
use crate::error::{Error, Result};
use crate::fock::{
    build_pdc_state, distribution_from_blocks, AnalyzerSetting, PairBlockState, PdcSource,
};
use crate::simplex::{self, SimplexOptions};

/// Coincidence totals below this leave the correlation undefined.
const COINCIDENCE_FLOOR: f64 = 1e-300;

/// Correlation coefficient from the four coincidence probabilities:
/// `(P_same - P_different) / (P_same + P_different)`.
///
/// Fails with [`Error::NoCoincidence`] when essentially no coincidences
/// occur; callers must not coerce that case to zero.
pub fn correlation(probs: &CoincidenceProbabilities) -> Result<f64> {
    let same = probs.p_same();
    let different = probs.p_different();
    let total = same + different;
    if total.is_nan() || total <= COINCIDENCE_FLOOR {
        return Err(Error::NoCoincidence);
    }
    Ok((same - different) / total)
}

/// CHSH combination of four correlation coefficients:
/// `|E11 - E12| + |E22 + E21|`.
pub fn bell_parameter(e11: f64, e12: f64, e22: f64, e21: f64) -> f64 {
    (e11 - e12).abs() + (e22 + e21).abs()
}

/// The four analyzer angles of a CHSH run (phase shifters fixed to zero),
/// stored as canonical representatives in `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    /// First analyzer angle at site A.
    pub theta_a1: f64,
    /// Second analyzer angle at site A.
    pub theta_a2: f64,
    /// First analyzer angle at site B.
    pub theta_b1: f64,
    /// Second analyzer angle at site B.
    pub theta_b2: f64,
}

impl BellSettings {
    /// Canonicalize each angle into `[0, π)`.
    pub fn new(theta_a1: f64, theta_a2: f64, theta_b1: f64, theta_b2: f64) -> Self {
        Self {
            theta_a1: canonical_angle(theta_a1),
            theta_a2: canonical_angle(theta_a2),
            theta_b1: canonical_angle(theta_b1),
            theta_b2: canonical_angle(theta_b2),
        }
    }
}

/// Reduce an angle to `[0, π)`, the probability period of the analyzers.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r == PI {
        0.0
    } else {
        r
    }
}

/// Outcome of a Bell-parameter maximization.
#[derive(Debug, Clone)]
pub struct BellResult {
    /// Largest Bell parameter found.
    pub bell_value: f64,
    /// Angles attaining it.
    pub settings: BellSettings,
    /// The four correlations at those angles, ordered `[E11, E12, E21, E22]`.
    pub correlations: [f64; 4],
    /// Postprocessing model the run used.
    pub model: PostprocessingModel,
}

/// Source + detectors + postprocessing bundled into a reusable correlation
/// evaluator. Building it expands the source state once; evaluations are
/// pure and safe to run concurrently.
pub struct CorrelationPipeline {
    source: PdcSource,
    blocks: Vec<PairBlockState>,
    params: DetectorParams,
    model: PostprocessingModel,
}

impl CorrelationPipeline {
    /// Expand the source and fix the detector model.
    pub fn new(
        source: &PdcSource,
        params: &DetectorParams,
        model: PostprocessingModel,
    ) -> Result<Self> {
        Ok(Self {
            source: *source,
            blocks: build_pdc_state(source)?,
            params: *params,
            model,
        })
    }

    /// Postprocessing model in effect.
    pub fn model(&self) -> PostprocessingModel {
        self.model
    }

    /// Coincidence probabilities at one pair of analyzer settings.
    pub fn coincidences(
        &self,
        setting_a: &AnalyzerSetting,
        setting_b: &AnalyzerSetting,
    ) -> CoincidenceProbabilities {
        let dist = distribution_from_blocks(&self.blocks, setting_a, setting_b, &self.source);
        coincidence_probabilities(&dist, &self.params, self.model)
    }

    /// Correlation coefficient at one pair of analyzer settings.
    pub fn correlation(
        &self,
        setting_a: &AnalyzerSetting,
        setting_b: &AnalyzerSetting,
    ) -> Result<f64> {
        correlation(&self.coincidences(setting_a, setting_b))
    }

    fn correlation_at_angles(&self, theta_a: f64, theta_b: f64) -> Result<f64> {
        self.correlation(&AnalyzerSetting::new(theta_a), &AnalyzerSetting::new(theta_b))
    }

    /// Whether the correlation depends on the analyzer angles only through
    /// their difference, probed by shifting both angles together.
    fn is_shift_invariant(&self) -> Result<bool> {
        for &(ta, tb) in &[(0.31, 0.11), (1.07, 0.63)] {
            let base = self.correlation_at_angles(ta, tb)?;
            for &shift in &[0.29, 0.91] {
                let shifted = self.correlation_at_angles(ta + shift, tb + shift)?;
                if (base - shifted).abs() > 1e-9 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Memoizing wrapper around the difference-angle correlation `E(Δ)`.
struct DeltaCorrelation<'a> {
    pipeline: &'a CorrelationPipeline,
    cache: HashMap<u64, Option<f64>>,
}

impl<'a> DeltaCorrelation<'a> {
    fn new(pipeline: &'a CorrelationPipeline) -> Self {
        Self {
            pipeline,
            cache: HashMap::new(),
        }
    }

    fn eval(&mut self, delta: f64) -> Option<f64> {
        let canonical = canonical_angle(delta);
        let key = canonical.to_bits();
        if let Some(&hit) = self.cache.get(&key) {
            return hit;
        }
        let value = self.pipeline.correlation_at_angles(canonical, 0.0).ok();
        self.cache.insert(key, value);
        value
    }
}

/// Number of coarse-grid points per angle axis.
const GRID_POINTS: usize = 64;
/// Coarse-grid resolution for the full four-angle fallback search.
const FULL_GRID_POINTS: usize = 16;

/// Search the analyzer angles for the largest CHSH Bell parameter.
///
/// The correlation of this source depends on the angles only through
/// `θ_A - θ_B`; once that is verified on the live pipeline, the search runs
/// over the three independent differences `(Δ11, Δ12, Δ21)` (with
/// `Δ22 = Δ21 + Δ12 - Δ11`) on a 64-point-per-axis grid followed by a
/// simplex refinement. If the invariance probe ever failed, the search would
/// fall back to the full four-angle version of the same scheme. Angle
/// candidates without coincidences are excluded from the domain. The result
/// never falls below the best coarse-grid value, and is deterministic for
/// fixed inputs.
pub fn maximize_bell(
    source: &PdcSource,
    params: &DetectorParams,
    model: PostprocessingModel,
) -> Result<BellResult> {
    let pipeline = CorrelationPipeline::new(source, params, model)?;
    if pipeline.is_shift_invariant()? {
        maximize_reduced(&pipeline)
    } else {
        maximize_full(&pipeline)
    }
}

fn bell_from_deltas(e: &mut DeltaCorrelation<'_>, d11: f64, d12: f64, d21: f64) -> Option<f64> {
    let d22 = d21 + d12 - d11;
    Some(bell_parameter(
        e.eval(d11)?,
        e.eval(d12)?,
        e.eval(d22)?,
        e.eval(d21)?,
    ))
}

fn maximize_reduced(pipeline: &CorrelationPipeline) -> Result<BellResult> {
    let step = PI / GRID_POINTS as f64;

    // Correlations on the difference grid, evaluated in parallel but consumed
    // in a fixed order.
    let grid: Vec<Option<f64>> = (0..GRID_POINTS)
        .into_par_iter()
        .map(|k| {
            pipeline
                .correlation_at_angles(k as f64 * step, 0.0)
                .ok()
        })
        .collect();
    if grid.iter().all(|e| e.is_none()) {
        return Err(Error::NoCoincidence);
    }

    let mut best: Option<(f64, [usize; 3])> = None;
    for k11 in 0..GRID_POINTS {
        let Some(e11) = grid[k11] else { continue };
        for k12 in 0..GRID_POINTS {
            let Some(e12) = grid[k12] else { continue };
            let first = (e11 - e12).abs();
            for k21 in 0..GRID_POINTS {
                let Some(e21) = grid[k21] else { continue };
                let k22 = (k21 + k12 + GRID_POINTS - k11) % GRID_POINTS;
                let Some(e22) = grid[k22] else { continue };
                let value = first + (e22 + e21).abs();
                if best.map_or(true, |(b, _)| value > b) {
                    best = Some((value, [k11, k12, k21]));
                }
            }
        }
    }
    let (grid_value, [k11, k12, k21]) = best.ok_or(Error::NoCoincidence)?;
    let start = [k11 as f64 * step, k12 as f64 * step, k21 as f64 * step];

    let mut memo = DeltaCorrelation::new(pipeline);
    for (k, &e) in grid.iter().enumerate() {
        memo.cache.insert(canonical_angle(k as f64 * step).to_bits(), e);
    }
    let refine = simplex::maximize(
        |x| bell_from_deltas(&mut memo, x[0], x[1], x[2]),
        &start,
        &SimplexOptions {
            initial_step: step,
            ..SimplexOptions::default()
        },
    );

    let (value, deltas) = if refine.value > grid_value {
        (refine.value, [refine.x[0], refine.x[1], refine.x[2]])
    } else {
        (grid_value, start)
    };
    let (d11, d12, d21) = (deltas[0], deltas[1], deltas[2]);
    let d22 = d21 + d12 - d11;

    // Gauge choice θ_B1 = 0 turns the differences back into angles.
    let settings = BellSettings::new(d11, d21, 0.0, d11 - d12);
    let correlations = [
        memo.eval(d11).ok_or(Error::NoCoincidence)?,
        memo.eval(d12).ok_or(Error::NoCoincidence)?,
        memo.eval(d21).ok_or(Error::NoCoincidence)?,
        memo.eval(d22).ok_or(Error::NoCoincidence)?,
    ];
    Ok(BellResult {
        bell_value: value,
        settings,
        correlations,
        model: pipeline.model,
    })
}

/// Full four-angle search, used only if the difference-angle reduction is
/// not valid for the pipeline at hand.
fn maximize_full(pipeline: &CorrelationPipeline) -> Result<BellResult> {
    let step = PI / FULL_GRID_POINTS as f64;
    let table: Vec<Option<f64>> = (0..FULL_GRID_POINTS * FULL_GRID_POINTS)
        .into_par_iter()
        .map(|idx| {
            let a = (idx / FULL_GRID_POINTS) as f64 * step;
            let b = (idx % FULL_GRID_POINTS) as f64 * step;
            pipeline.correlation_at_angles(a, b).ok()
        })
        .collect();
    let lookup = |a: usize, b: usize| table[a * FULL_GRID_POINTS + b];

    let mut best: Option<(f64, [usize; 4])> = None;
    for a1 in 0..FULL_GRID_POINTS {
        for b1 in 0..FULL_GRID_POINTS {
            let Some(e11) = lookup(a1, b1) else { continue };
            for b2 in 0..FULL_GRID_POINTS {
                let Some(e12) = lookup(a1, b2) else { continue };
                let first = (e11 - e12).abs();
                for a2 in 0..FULL_GRID_POINTS {
                    let (Some(e22), Some(e21)) = (lookup(a2, b2), lookup(a2, b1)) else {
                        continue;
                    };
                    let value = first + (e22 + e21).abs();
                    if best.map_or(true, |(b, _)| value > b) {
                        best = Some((value, [a1, a2, b1, b2]));
                    }
                }
            }
        }
    }
    let (grid_value, idx) = best.ok_or(Error::NoCoincidence)?;
    let start: Vec<f64> = idx.iter().map(|&k| k as f64 * step).collect();

    let objective = |x: &[f64]| -> Option<f64> {
        let e11 = pipeline.correlation_at_angles(x[0], x[2]).ok()?;
        let e12 = pipeline.correlation_at_angles(x[0], x[3]).ok()?;
        let e21 = pipeline.correlation_at_angles(x[1], x[2]).ok()?;
        let e22 = pipeline.correlation_at_angles(x[1], x[3]).ok()?;
        Some(bell_parameter(e11, e12, e22, e21))
    };
    let refine = simplex::maximize(objective, &start, &SimplexOptions {
        initial_step: step,
        ..SimplexOptions::default()
    });

    let x = if refine.value > grid_value {
        refine.x.clone()
    } else {
        start
    };
    let value = refine.value.max(grid_value);
    let settings = BellSettings::new(x[0], x[1], x[2], x[3]);
    let correlations = [
        pipeline.correlation_at_angles(x[0], x[2])?,
        pipeline.correlation_at_angles(x[0], x[3])?,
        pipeline.correlation_at_angles(x[1], x[2])?,
        pipeline.correlation_at_angles(x[1], x[3])?,
    ];
    Ok(BellResult {
        bell_value: value,
        settings,
        correlations,
        model: pipeline.model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    const CIRELSON: f64 = 2.0 * SQRT_2;

    #[test]
    fn perfect_anticorrelation() {
        let probs = CoincidenceProbabilities {
            tt: 0.0,
            tr: 0.5,
            rt: 0.5,
            rr: 0.0,
        };
        assert_eq!(correlation(&probs).unwrap(), -1.0);
    }

    #[test]
    fn no_coincidence_is_an_error() {
        let probs = CoincidenceProbabilities::default();
        assert!(matches!(correlation(&probs), Err(Error::NoCoincidence)));
    }

    #[test]
    fn bell_parameter_fixtures() {
        assert_eq!(bell_parameter(0.0, 0.0, 0.0, 0.0), 0.0);
        let e = SQRT_2 / 2.0;
        assert!((bell_parameter(-e, e, -e, -e) - CIRELSON).abs() < 1e-12);
        assert_eq!(bell_parameter(-1.0, 1.0, -1.0, -1.0), 4.0);
    }

    #[test]
    fn singlet_limit_correlation_is_minus_cosine() {
        let source = PdcSource::new(1e-3).unwrap();
        let pipeline = CorrelationPipeline::new(
            &source,
            &DetectorParams::ideal(),
            PostprocessingModel::NaiveOnOff,
        )
        .unwrap();
        for &delta in &[0.0, 0.4, PI / 8.0, 1.3] {
            let e = pipeline.correlation_at_angles(delta, 0.0).unwrap();
            assert!((e + (2.0 * delta).cos()).abs() < 1e-5);
        }
    }

    #[test]
    fn pipeline_correlation_matches_reduced_ideal_form() {
        let source = PdcSource::new(0.5).unwrap();
        let pipeline = CorrelationPipeline::new(
            &source,
            &DetectorParams::ideal(),
            PostprocessingModel::NaiveOnOff,
        )
        .unwrap();
        let e = pipeline.correlation_at_angles(PI / 8.0, 0.0).unwrap();
        assert!((e - -0.7542472332656508).abs() < 1e-10);
    }

    #[test]
    fn ideal_number_resolving_correlation_is_exactly_the_singlet_one() {
        // With unit efficiency and no noise, postselecting on exactly one
        // count per site admits only the one-pair block, whatever the
        // pumping strength.
        let source = PdcSource::new(0.6).unwrap();
        let pipeline = CorrelationPipeline::new(
            &source,
            &DetectorParams::ideal(),
            PostprocessingModel::PhotonNumberResolving,
        )
        .unwrap();
        for &delta in &[0.0, 0.37, PI / 8.0, 1.2, 2.9] {
            let e = pipeline.correlation_at_angles(delta, 0.0).unwrap();
            assert!(
                (e + (2.0 * delta).cos()).abs() < 1e-12,
                "Δ = {delta}: {e}"
            );
        }
    }

    #[test]
    fn correlation_is_invariant_under_global_rotation() {
        let source = PdcSource::new(0.45).unwrap();
        let params = DetectorParams::new(0.8, 1e-6).unwrap();
        for model in PostprocessingModel::ALL {
            let pipeline = CorrelationPipeline::new(&source, &params, model).unwrap();
            let base = pipeline.correlation_at_angles(0.7, 0.2).unwrap();
            for &shift in &[0.5, 1.9] {
                let shifted = pipeline
                    .correlation_at_angles(0.7 + shift, 0.2 + shift)
                    .unwrap();
                assert!((base - shifted).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bell_value_invariant_under_global_setting_rotation() {
        let source = PdcSource::new(0.5).unwrap();
        let params = DetectorParams::new(0.9, 1e-6).unwrap();
        let pipeline =
            CorrelationPipeline::new(&source, &params, PostprocessingModel::NaiveOnOff).unwrap();
        let bell_at = |a1: f64, a2: f64, b1: f64, b2: f64| {
            bell_parameter(
                pipeline.correlation_at_angles(a1, b1).unwrap(),
                pipeline.correlation_at_angles(a1, b2).unwrap(),
                pipeline.correlation_at_angles(a2, b2).unwrap(),
                pipeline.correlation_at_angles(a2, b1).unwrap(),
            )
        };
        let base = bell_at(0.0, PI / 4.0, PI / 8.0, 3.0 * PI / 8.0);
        let shift = 0.37;
        let moved = bell_at(
            shift,
            PI / 4.0 + shift,
            PI / 8.0 + shift,
            3.0 * PI / 8.0 + shift,
        );
        assert!((base - moved).abs() < 1e-10);
    }

    #[test]
    fn weak_source_saturates_the_quantum_bound_for_all_models() {
        let source = PdcSource::new(1e-3).unwrap();
        let params = DetectorParams::ideal();
        for model in PostprocessingModel::ALL {
            let result = maximize_bell(&source, &params, model).unwrap();
            assert!(
                (result.bell_value - CIRELSON).abs() < 1e-4,
                "model {model:?}: {}",
                result.bell_value
            );
        }
    }

    #[test]
    fn naive_postprocessing_fakes_a_violation() {
        let source = PdcSource::new(0.5).unwrap();
        let result = maximize_bell(
            &source,
            &DetectorParams::ideal(),
            PostprocessingModel::NaiveOnOff,
        )
        .unwrap();
        // The optimum sits at the standard settings, worth
        // 4 cos(π/4) / (1 - 0.0625) ≈ 3.01699 — beyond the quantum bound.
        let standard = 4.0 * (PI / 4.0).cos() / (1.0 - 0.0625);
        assert!(
            result.bell_value >= standard - 1e-9,
            "got {}, want at least {standard}",
            result.bell_value
        );
        assert!(result.bell_value > CIRELSON);
        for e in result.correlations {
            assert!((-1.0..=1.0).contains(&e));
        }
        assert!(result.bell_value <= 4.0);
    }

    #[test]
    fn squash_stays_within_the_quantum_bound() {
        // The full efficiency/noise grid runs in the acceptance suite; these
        // spot checks cover ideal and lossy corners.
        for &(t, eta, n_nc) in &[(0.5, 1.0, 0.0), (0.45, 0.6, 1e-3), (0.3, 0.4, 1e-6)] {
            let source = PdcSource::new(t).unwrap();
            let params = DetectorParams::new(eta, n_nc).unwrap();
            let result =
                maximize_bell(&source, &params, PostprocessingModel::SquashOnOff).unwrap();
            assert!(
                result.bell_value <= CIRELSON + 1e-9,
                "t={t}, η={eta}, N={n_nc}: got {}",
                result.bell_value
            );
        }
    }

    #[test]
    fn full_angle_fallback_agrees_with_the_reduced_search() {
        // The fallback only runs when the difference-angle reduction fails
        // its probe, which no source built here triggers; exercise it
        // directly and check it lands on the same optimum.
        let source = PdcSource::new(0.3).unwrap();
        let params = DetectorParams::new(0.8, 1e-6).unwrap();
        let pipeline =
            CorrelationPipeline::new(&source, &params, PostprocessingModel::NaiveOnOff).unwrap();
        let reduced = maximize_reduced(&pipeline).unwrap();
        let full = maximize_full(&pipeline).unwrap();
        assert!(
            (reduced.bell_value - full.bell_value).abs() < 1e-4,
            "reduced {} vs full {}",
            reduced.bell_value,
            full.bell_value
        );
    }

    #[test]
    fn refinement_never_loses_to_the_coarse_grid() {
        let source = PdcSource::new(0.35).unwrap();
        let params = DetectorParams::new(0.6, 1e-6).unwrap();
        let pipeline =
            CorrelationPipeline::new(&source, &params, PostprocessingModel::NaiveOnOff).unwrap();
        let step = PI / GRID_POINTS as f64;
        let grid: Vec<Option<f64>> = (0..GRID_POINTS)
            .map(|k| pipeline.correlation_at_angles(k as f64 * step, 0.0).ok())
            .collect();
        let mut coarse_best = f64::NEG_INFINITY;
        for k11 in 0..GRID_POINTS {
            for k12 in 0..GRID_POINTS {
                for k21 in 0..GRID_POINTS {
                    let k22 = (k21 + k12 + GRID_POINTS - k11) % GRID_POINTS;
                    if let (Some(e11), Some(e12), Some(e21), Some(e22)) =
                        (grid[k11], grid[k12], grid[k21], grid[k22])
                    {
                        coarse_best = coarse_best.max(bell_parameter(e11, e12, e22, e21));
                    }
                }
            }
        }
        let result =
            maximize_bell(&source, &params, PostprocessingModel::NaiveOnOff).unwrap();
        assert!(result.bell_value >= coarse_best - 1e-12);
    }

    #[test]
    fn vacuum_without_noise_has_no_defined_maximum() {
        let source = PdcSource::new(0.0).unwrap();
        let err = maximize_bell(
            &source,
            &DetectorParams::ideal(),
            PostprocessingModel::NaiveOnOff,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoCoincidence));
    }

    #[test]
    fn canonical_angles_land_in_half_open_interval() {
        for &theta in &[-0.1, 0.0, PI, 1.5 * PI, -3.9 * PI] {
            let c = canonical_angle(theta);
            assert!((0.0..PI).contains(&c), "{theta} -> {c}");
        }
        let settings = BellSettings::new(-0.1, PI, 2.0 * PI, 0.5);
        assert!(settings.theta_a1 > 0.0 && settings.theta_a1 < PI);
        assert_eq!(settings.theta_a2, 0.0);
        assert_eq!(settings.theta_b1, 0.0);
    }
}
