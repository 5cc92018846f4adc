//! Linear reconstruction of an effective two-qubit density operator from
//! nine measured correlation coefficients.
//!
//! Each site measures along three Bloch directions selected by analyzer
//! angles `(θ, φ)`; the directions may be non-orthogonal, in which case the
//! expansion uses the dual basis built from the inverse Gram (metric) matrix.
//! For data produced by a genuine two-qubit state the reconstruction is
//! basis-independent and positive semidefinite. For naive on-off
//! postprocessing it is neither — quantifying that failure is the purpose of
//! this module, so positivity is deliberately not enforced.

use num_complex::Complex64;

use crate::chsh::CorrelationPipeline;
use crate::detector::{DetectorParams, PostprocessingModel};
use crate::error::{Error, Result};
use crate::fock::{AnalyzerSetting, PdcSource};
use crate::linalg::{det3, hermitian_eigenvalues_4, invert3};

/// Determinant floor below which a measurement basis is rejected.
const BASIS_DET_FLOOR: f64 = 1e-10;

/// Three analyzer settings per site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyBasis {
    /// Settings used at site A.
    pub site_a: [AnalyzerSetting; 3],
    /// Settings used at site B.
    pub site_b: [AnalyzerSetting; 3],
}

/// Bloch direction probed by one analyzer setting:
/// `(sin 2θ cos φ, sin 2θ sin φ, cos 2θ)`.
pub fn bloch_direction(setting: &AnalyzerSetting) -> [f64; 3] {
    let two_theta = 2.0 * setting.theta;
    [
        two_theta.sin() * setting.phi.cos(),
        two_theta.sin() * setting.phi.sin(),
        two_theta.cos(),
    ]
}

fn direction_determinant(settings: &[AnalyzerSetting; 3]) -> f64 {
    let rows = [
        bloch_direction(&settings[0]),
        bloch_direction(&settings[1]),
        bloch_direction(&settings[2]),
    ];
    det3(&rows)
}

impl TomographyBasis {
    /// Basis from explicit per-site settings; each site's three Bloch
    /// directions must be linearly independent.
    pub fn new(site_a: [AnalyzerSetting; 3], site_b: [AnalyzerSetting; 3]) -> Result<Self> {
        for settings in [&site_a, &site_b] {
            let det = direction_determinant(settings);
            if det.abs() <= BASIS_DET_FLOOR {
                return Err(Error::DegenerateBasis { det });
            }
        }
        Ok(Self { site_a, site_b })
    }

    /// Orthogonal preset: both sites measure along x, y, z.
    pub fn fig4a() -> Self {
        let site = [
            AnalyzerSetting::with_phase(std::f64::consts::FRAC_PI_4, 0.0),
            AnalyzerSetting::with_phase(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2),
            AnalyzerSetting::with_phase(0.0, 0.0),
        ];
        Self {
            site_a: site,
            site_b: site,
        }
    }

    /// Skewed preset with non-orthogonal directions and unequal sites.
    pub fn fig4b() -> Self {
        use std::f64::consts::{FRAC_PI_2, PI};
        Self {
            site_a: [
                AnalyzerSetting::with_phase(PI / 8.0, 0.0),
                AnalyzerSetting::with_phase(9.0 * PI / 4.0, FRAC_PI_2),
                AnalyzerSetting::with_phase(PI, 0.0),
            ],
            site_b: [
                AnalyzerSetting::with_phase(3.0 * PI / 15.0, 0.0),
                AnalyzerSetting::with_phase(-PI / 24.0, FRAC_PI_2),
                AnalyzerSetting::with_phase(PI, 0.0),
            ],
        }
    }
}

/// Gram matrix of one site's Bloch directions and its inverse (the metric
/// raising indices in the dual-basis expansion).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    /// Inverse of `g_inverse`, computed by closed-form adjugate.
    pub g: [[f64; 3]; 3],
    /// Pairwise direction overlaps
    /// `cos2θ_i cos2θ_k + sin2θ_i sin2θ_k cos(φ_i - φ_k)`.
    pub g_inverse: [[f64; 3]; 3],
}

/// Metric tensor for one site's settings.
pub fn metric_tensor(settings: &[AnalyzerSetting; 3]) -> Result<MetricTensor> {
    let mut g_inverse = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let (ti, tk) = (2.0 * settings[i].theta, 2.0 * settings[k].theta);
            g_inverse[i][k] = ti.cos() * tk.cos()
                + ti.sin() * tk.sin() * (settings[i].phi - settings[k].phi).cos();
        }
    }
    let g = invert3(&g_inverse, BASIS_DET_FLOOR).ok_or(Error::DegenerateBasis {
        det: det3(&g_inverse),
    })?;
    Ok(MetricTensor { g, g_inverse })
}

/// Traceless Hermitian direction operator for one setting,
/// `[[cos2θ, e^{-iφ} sin2θ], [e^{iφ} sin2θ, -cos2θ]]`.
fn direction_operator(setting: &AnalyzerSetting) -> [[Complex64; 2]; 2] {
    let two_theta = 2.0 * setting.theta;
    let (c, s) = (two_theta.cos(), two_theta.sin());
    [
        [
            Complex64::new(c, 0.0),
            Complex64::new(s * setting.phi.cos(), -s * setting.phi.sin()),
        ],
        [
            Complex64::new(s * setting.phi.cos(), s * setting.phi.sin()),
            Complex64::new(-c, 0.0),
        ],
    ]
}

/// Dual-basis operator for direction `i` of one site:
/// `Ξ^{(i)} = Σ_k g^{(k,i)} D_k` with `D_k` the direction operators.
/// Satisfies `Tr(Ξ^{(i)} D_k) = 2 δ_{ik}`.
pub fn xi_matrix(
    settings: &[AnalyzerSetting; 3],
    metric: &MetricTensor,
    i: usize,
) -> [[Complex64; 2]; 2] {
    let mut xi = [[Complex64::ZERO; 2]; 2];
    for (k, setting) in settings.iter().enumerate() {
        let d = direction_operator(setting);
        let w = metric.g[k][i];
        for (xi_row, d_row) in xi.iter_mut().zip(d.iter()) {
            for (x, dv) in xi_row.iter_mut().zip(d_row.iter()) {
                *x += w * dv;
            }
        }
    }
    xi
}

/// The nine correlation coefficients measured through the full pipeline:
/// `E[i][j]` pairs setting `i` of site A with setting `j` of site B,
/// transmitted mapped to +1 and reflected to -1 at both sites.
pub fn measure_correlation_matrix(
    source: &PdcSource,
    params: &DetectorParams,
    model: PostprocessingModel,
    basis: &TomographyBasis,
) -> Result<[[f64; 3]; 3]> {
    let pipeline = CorrelationPipeline::new(source, params, model)?;
    let mut e = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            e[i][j] = pipeline.correlation(&basis.site_a[i], &basis.site_b[j])?;
        }
    }
    Ok(e)
}

/// Effective two-qubit density operator with its spectrum. The eigenvalues
/// are real and sum to one, but nothing forces them non-negative.
#[derive(Debug, Clone)]
pub struct TwoQubitDensityMatrix {
    /// The reconstructed 4×4 operator (site A ⊗ site B ordering).
    pub rho: [[Complex64; 4]; 4],
    /// Eigenvalues sorted ascending.
    pub eigenvalues: [f64; 4],
    /// Smallest eigenvalue; negative when the data is not two-qubit
    /// consistent.
    pub min_eigenvalue: f64,
}

impl TwoQubitDensityMatrix {
    /// Trace of the operator (real part; imaginary part is zero by
    /// construction).
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.rho[i][i].re).sum()
    }

    /// Largest magnitude of `ρ - ρ†` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }
}

/// Assemble the density operator from a measured correlation matrix:
/// `ρ = (I ⊗ I)/4 + (1/4) Σ_{ij} E[i][j] Ξ_A^{(i)} ⊗ Ξ_B^{(j)}`.
pub fn reconstruct_density(
    e: &[[f64; 3]; 3],
    basis: &TomographyBasis,
) -> Result<TwoQubitDensityMatrix> {
    let metric_a = metric_tensor(&basis.site_a)?;
    let metric_b = metric_tensor(&basis.site_b)?;
    let xi_a: Vec<[[Complex64; 2]; 2]> =
        (0..3).map(|i| xi_matrix(&basis.site_a, &metric_a, i)).collect();
    let xi_b: Vec<[[Complex64; 2]; 2]> =
        (0..3).map(|j| xi_matrix(&basis.site_b, &metric_b, j)).collect();

    let mut rho = [[Complex64::ZERO; 4]; 4];
    for i in 0..4 {
        rho[i][i] = Complex64::new(0.25, 0.0);
    }
    for i in 0..3 {
        for j in 0..3 {
            let w = 0.25 * e[i][j];
            if w == 0.0 {
                continue;
            }
            for (a_row, a_col, b_row, b_col) in
                itertools4()
            {
                rho[2 * a_row + b_row][2 * a_col + b_col] +=
                    w * xi_a[i][a_row][a_col] * xi_b[j][b_row][b_col];
            }
        }
    }

    let eigenvalues = hermitian_eigenvalues_4(&rho);
    Ok(TwoQubitDensityMatrix {
        rho,
        eigenvalues,
        min_eigenvalue: eigenvalues[0],
    })
}

fn itertools4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..2).flat_map(|a| {
        (0..2).flat_map(move |b| (0..2).flat_map(move |c| (0..2).map(move |d| (a, b, c, d))))
    })
}

/// Measure and reconstruct in one step.
pub fn scan_density(
    source: &PdcSource,
    params: &DetectorParams,
    model: PostprocessingModel,
    basis: &TomographyBasis,
) -> Result<TwoQubitDensityMatrix> {
    let e = measure_correlation_matrix(source, params, model, basis)?;
    reconstruct_density(&e, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::CutoffPolicy;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn one_pair_source() -> PdcSource {
        PdcSource::with_cutoff(0.3, CutoffPolicy::Fixed(1)).unwrap()
    }

    #[test]
    fn orthogonal_preset_has_identity_metric() {
        let basis = TomographyBasis::fig4a();
        let metric = metric_tensor(&basis.site_a).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((metric.g_inverse[i][k] - expect).abs() < 1e-12);
                assert!((metric.g[i][k] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metric_inverse_roundtrips_for_skewed_preset() {
        let basis = TomographyBasis::fig4b();
        for settings in [&basis.site_a, &basis.site_b] {
            let metric = metric_tensor(settings).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let prod: f64 =
                        (0..3).map(|k| metric.g[i][k] * metric.g_inverse[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((prod - expect).abs() < 1e-10);
                }
            }
            for i in 0..3 {
                assert!((metric.g_inverse[i][i] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn skewed_preset_site_a_metric_matches_direct_evaluation() {
        let basis = TomographyBasis::fig4b();
        let metric = metric_tensor(&basis.site_a).unwrap();
        let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
        let expect_inv = [
            [1.0, 0.0, half_sqrt2],
            [0.0, 1.0, 0.0],
            [half_sqrt2, 0.0, 1.0],
        ];
        let expect_g = [
            [2.0, 0.0, -std::f64::consts::SQRT_2],
            [0.0, 1.0, 0.0],
            [-std::f64::consts::SQRT_2, 0.0, 2.0],
        ];
        for i in 0..3 {
            for k in 0..3 {
                assert!((metric.g_inverse[i][k] - expect_inv[i][k]).abs() < 1e-12);
                assert!((metric.g[i][k] - expect_g[i][k]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn repeated_direction_is_degenerate() {
        let s = AnalyzerSetting::with_phase(0.3, 0.0);
        let t = AnalyzerSetting::with_phase(0.9, 0.4);
        assert!(matches!(
            TomographyBasis::new([s, s, t], [s, t, AnalyzerSetting::new(1.4)]),
            Err(Error::DegenerateBasis { .. })
        ));
        assert!(metric_tensor(&[s, s, t]).is_err());
    }

    #[test]
    fn orthogonal_dual_operators_are_paulis() {
        let basis = TomographyBasis::fig4a();
        let metric = metric_tensor(&basis.site_a).unwrap();
        let xi_z = xi_matrix(&basis.site_a, &metric, 2);
        assert!((xi_z[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((xi_z[1][1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(xi_z[0][1].norm() < 1e-12);
        let xi_x = xi_matrix(&basis.site_a, &metric, 0);
        assert!((xi_x[0][1] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((xi_x[1][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(xi_x[0][0].norm() < 1e-12);
    }

    #[test]
    fn dual_operators_satisfy_the_duality_relation() {
        for basis in [TomographyBasis::fig4a(), TomographyBasis::fig4b()] {
            for settings in [&basis.site_a, &basis.site_b] {
                let metric = metric_tensor(settings).unwrap();
                for i in 0..3 {
                    let xi = xi_matrix(settings, &metric, i);
                    for (k, setting) in settings.iter().enumerate() {
                        let d = direction_operator(setting);
                        let mut trace = Complex64::ZERO;
                        for a in 0..2 {
                            for b in 0..2 {
                                trace += xi[a][b] * d[b][a];
                            }
                        }
                        let expect = if i == k { 2.0 } else { 0.0 };
                        assert!(
                            (trace - Complex64::new(expect, 0.0)).norm() < 1e-10,
                            "duality failed at i = {i}, k = {k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn one_pair_correlations_are_negative_direction_overlaps() {
        // With exactly one pair and ideal detectors the measured correlations
        // reduce to -a_i · b_j.
        let source = one_pair_source();
        let params = DetectorParams::ideal();
        for basis in [TomographyBasis::fig4a(), TomographyBasis::fig4b()] {
            let e = measure_correlation_matrix(
                &source,
                &params,
                PostprocessingModel::NaiveOnOff,
                &basis,
            )
            .unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let a = bloch_direction(&basis.site_a[i]);
                    let b = bloch_direction(&basis.site_b[j]);
                    let dot: f64 = (0..3).map(|k| a[k] * b[k]).sum();
                    assert!(
                        (e[i][j] + dot).abs() < 1e-12,
                        "mismatch at ({i}, {j}): {} vs {}",
                        e[i][j],
                        -dot
                    );
                }
            }
        }
    }

    #[test]
    fn phase_shifters_select_the_y_axis() {
        let source = one_pair_source();
        let y = AnalyzerSetting::with_phase(FRAC_PI_4, FRAC_PI_2);
        let pipeline = CorrelationPipeline::new(
            &source,
            &DetectorParams::ideal(),
            PostprocessingModel::NaiveOnOff,
        )
        .unwrap();
        let e = pipeline.correlation(&y, &y).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_data_reconstructs_the_singlet_projector_in_both_bases() {
        let source = one_pair_source();
        let params = DetectorParams::ideal();
        let mut reconstructions = Vec::new();
        for basis in [TomographyBasis::fig4a(), TomographyBasis::fig4b()] {
            let e = measure_correlation_matrix(
                &source,
                &params,
                PostprocessingModel::NaiveOnOff,
                &basis,
            )
            .unwrap();
            let density = reconstruct_density(&e, &basis).unwrap();
            let expect = [0.0, 0.0, 0.0, 1.0];
            for (got, want) in density.eigenvalues.iter().zip(expect.iter()) {
                assert!((got - want).abs() < 1e-9);
            }
            assert!((density.trace() - 1.0).abs() < 1e-12);
            assert!(density.hermiticity_defect() < 1e-12);
            reconstructions.push(density);
        }
        // Basis independence on two-qubit-consistent data.
        for i in 0..4 {
            for j in 0..4 {
                let diff = (reconstructions[0].rho[i][j] - reconstructions[1].rho[i][j]).norm();
                assert!(diff < 1e-9, "entry ({i}, {j}) differs by {diff}");
            }
        }
    }

    #[test]
    fn zero_correlations_give_the_maximally_mixed_state() {
        let density = reconstruct_density(&[[0.0; 3]; 3], &TomographyBasis::fig4b()).unwrap();
        for ev in density.eigenvalues {
            assert!((ev - 0.25).abs() < 1e-12);
        }
        assert!((density.trace() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn reconstruction_is_hermitian_unit_trace_for_arbitrary_data() {
        let e = [[0.9, -0.3, 0.2], [0.1, -1.0, 0.7], [-0.5, 0.4, 0.05]];
        for basis in [TomographyBasis::fig4a(), TomographyBasis::fig4b()] {
            let density = reconstruct_density(&e, &basis).unwrap();
            assert!(density.hermiticity_defect() < 1e-12);
            assert!((density.trace() - 1.0).abs() < 1e-12);
            let sum: f64 = density.eigenvalues.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn any_correlation_matrix_reconstructs_hermitian_with_unit_trace(
            raw in proptest::collection::vec(-1.0f64..=1.0, 9),
        ) {
            let mut e = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    e[i][j] = raw[3 * i + j];
                }
            }
            for basis in [TomographyBasis::fig4a(), TomographyBasis::fig4b()] {
                let density = reconstruct_density(&e, &basis).unwrap();
                proptest::prop_assert!(density.hermiticity_defect() < 1e-12);
                proptest::prop_assert!((density.trace() - 1.0).abs() < 1e-12);
                let sum: f64 = density.eigenvalues.iter().sum();
                proptest::prop_assert!((sum - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn skewed_basis_turns_naive_postprocessing_negative() {
        let source = PdcSource::new(0.5).unwrap();
        let params = DetectorParams::new(0.6, 1e-6).unwrap();
        let density = scan_density(
            &source,
            &params,
            PostprocessingModel::NaiveOnOff,
            &TomographyBasis::fig4b(),
        )
        .unwrap();
        assert!(
            density.min_eigenvalue < 0.0,
            "expected negativity, got {}",
            density.min_eigenvalue
        );
        // Regression pin for the full pipeline at this operating point.
        assert!(
            (density.min_eigenvalue - -7.927_987_574_996e-3).abs() < 1e-9,
            "min eigenvalue drifted: {}",
            density.min_eigenvalue
        );
    }

    #[test]
    fn weak_source_eigenvalues_approach_the_singlet_spectrum() {
        let source = PdcSource::new(1e-3).unwrap();
        let params = DetectorParams::new(0.6, 1e-6).unwrap();
        let density = scan_density(
            &source,
            &params,
            PostprocessingModel::NaiveOnOff,
            &TomographyBasis::fig4a(),
        )
        .unwrap();
        let expect = [0.0, 0.0, 0.0, 1.0];
        for (got, want) in density.eigenvalues.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-4, "{:?}", density.eigenvalues);
        }
    }

    #[test]
    fn orthogonal_basis_stays_positive_at_moderate_strength() {
        let params = DetectorParams::new(0.6, 1e-6).unwrap();
        for &t in &[0.1, 0.35, 0.6] {
            let source = PdcSource::new(t).unwrap();
            let density = scan_density(
                &source,
                &params,
                PostprocessingModel::NaiveOnOff,
                &TomographyBasis::fig4a(),
            )
            .unwrap();
            assert!(density.min_eigenvalue >= -1e-9, "t = {t}: {}", density.min_eigenvalue);
        }
    }

    #[test]
    fn presets_differ_beyond_tolerance_for_naive_onoff_data() {
        // The same naive-postprocessing pipeline reconstructs to visibly
        // different operators under the two presets.
        let params = DetectorParams::new(0.6, 1e-6).unwrap();
        let mut max_gap: f64 = 0.0;
        for &t in &[0.3, 0.5, 0.7] {
            let source = PdcSource::new(t).unwrap();
            let rho_a = scan_density(
                &source,
                &params,
                PostprocessingModel::NaiveOnOff,
                &TomographyBasis::fig4a(),
            )
            .unwrap();
            let rho_b = scan_density(
                &source,
                &params,
                PostprocessingModel::NaiveOnOff,
                &TomographyBasis::fig4b(),
            )
            .unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    max_gap = max_gap.max((rho_a.rho[i][j] - rho_b.rho[i][j]).norm());
                }
            }
        }
        assert!(max_gap > 1e-3, "largest entry gap {max_gap}");
    }

    #[test]
    fn half_wave_plate_angles_beyond_one_period_are_accepted_verbatim() {
        // 9π/4 and π reduce to the same directions as π/4 and 0 only through
        // the doubled-angle trigonometry; the basis must accept them as is.
        let basis = TomographyBasis::fig4b();
        let d = bloch_direction(&basis.site_a[1]);
        assert!((d[0] - 0.0).abs() < 1e-12);
        assert!((d[1] - 1.0).abs() < 1e-12);
        let d3 = bloch_direction(&basis.site_a[2]);
        assert!((d3[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fig4a_matches_manual_orthogonal_settings() {
        let manual = TomographyBasis::new(
            [
                AnalyzerSetting::with_phase(FRAC_PI_4, 0.0),
                AnalyzerSetting::with_phase(FRAC_PI_4, FRAC_PI_2),
                AnalyzerSetting::new(0.0),
            ],
            [
                AnalyzerSetting::with_phase(FRAC_PI_4, 0.0),
                AnalyzerSetting::with_phase(FRAC_PI_4, FRAC_PI_2),
                AnalyzerSetting::new(0.0),
            ],
        )
        .unwrap();
        assert_eq!(manual, TomographyBasis::fig4a());
    }
}
