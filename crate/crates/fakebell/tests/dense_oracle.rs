//! Brute-force cross-check of the block-diagonal engine against a dense
//! four-mode construction.
//!
//! The oracle here shares no code path with the engine: it builds explicit
//! annihilation-operator matrices on a per-mode truncated grid, exponentiates
//! the analyzer generator `θ (a_H† a_V - a_V† a_H)` (followed by the phase
//! rotation `exp(iφ n_H)`), applies the resulting site unitaries to the full
//! four-mode state vector, and reads output photon-number probabilities off
//! the grid.

use num_complex::Complex64;

use fakebell::fock::{
    joint_photon_distribution, AnalyzerSetting, CutoffPolicy, PdcSource, PhotonConfig,
};

/// Dense complex matrix, row-major.
#[derive(Clone)]
struct Mat {
    dim: usize,
    data: Vec<Complex64>,
}

impl Mat {
    fn zeros(dim: usize) -> Self {
        Mat {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    fn mul(&self, other: &Mat) -> Mat {
        let dim = self.dim;
        let mut out = Mat::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let lhs = self.get(i, k);
                if lhs == Complex64::ZERO {
                    continue;
                }
                for j in 0..dim {
                    out.data[i * dim + j] += lhs * other.get(k, j);
                }
            }
        }
        out
    }

    fn scale(&self, factor: f64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    fn add_assign(&mut self, other: &Mat) {
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
    }

    fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling-and-squaring with a plain Taylor core.
    fn expm(&self) -> Mat {
        let mut squarings = 0u32;
        let mut norm = self.one_norm();
        while norm > 0.25 {
            norm *= 0.5;
            squarings += 1;
        }
        let scaled = self.scale(0.5f64.powi(squarings as i32));
        let mut result = Mat::identity(self.dim);
        let mut term = Mat::identity(self.dim);
        for k in 1..64 {
            term = term.mul(&scaled).scale(1.0 / k as f64);
            result.add_assign(&term);
            if term.one_norm() < 1e-20 {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}

/// Two-mode site space with per-mode occupations `0..=levels-1`; index
/// `(h, v) -> h * levels + v`.
fn annihilator_h(levels: usize) -> Mat {
    let dim = levels * levels;
    let mut a = Mat::zeros(dim);
    for h in 1..levels {
        for v in 0..levels {
            a.set(
                (h - 1) * levels + v,
                h * levels + v,
                Complex64::new((h as f64).sqrt(), 0.0),
            );
        }
    }
    a
}

fn annihilator_v(levels: usize) -> Mat {
    let dim = levels * levels;
    let mut a = Mat::zeros(dim);
    for h in 0..levels {
        for v in 1..levels {
            a.set(
                h * levels + (v - 1),
                h * levels + v,
                Complex64::new((v as f64).sqrt(), 0.0),
            );
        }
    }
    a
}

fn dagger(m: &Mat) -> Mat {
    let mut out = Mat::zeros(m.dim);
    for i in 0..m.dim {
        for j in 0..m.dim {
            out.set(i, j, m.get(j, i).conj());
        }
    }
    out
}

/// Site unitary mapping horizontal/vertical occupations to
/// transmitted/reflected ones: `exp[θ(a_H† a_V - a_V† a_H)] · exp(iφ n_H)`.
fn site_unitary(levels: usize, theta: f64, phi: f64) -> Mat {
    let a_h = annihilator_h(levels);
    let a_v = annihilator_v(levels);
    let mut generator = dagger(&a_h).mul(&a_v);
    let swap = dagger(&a_v).mul(&a_h);
    for (g, s) in generator.data.iter_mut().zip(swap.data.iter()) {
        *g = (*g - s) * theta;
    }
    let rotation = generator.expm();
    let mut phase = Mat::zeros(levels * levels);
    for h in 0..levels {
        for v in 0..levels {
            let idx = h * levels + v;
            phase.set(idx, idx, Complex64::from_polar(1.0, phi * h as f64));
        }
    }
    rotation.mul(&phase)
}

/// Four-mode state vector as a (site A) × (site B) matrix of amplitudes in
/// the horizontal/vertical occupation grid, truncated at `n_max` pairs.
fn pdc_state_matrix(levels: usize, n_max: usize, tanh_chi: f64) -> Vec<Vec<Complex64>> {
    let dim = levels * levels;
    let mut psi = vec![vec![Complex64::ZERO; dim]; dim];
    let norm = 1.0 - tanh_chi * tanh_chi;
    for n in 0..=n_max {
        for m in 0..=n {
            let amp = norm * tanh_chi.powi(n as i32) * if m % 2 == 0 { 1.0 } else { -1.0 };
            let site_a = (n - m) * levels + m; // n-m horizontal, m vertical
            let site_b = m * levels + (n - m); // m horizontal, n-m vertical
            psi[site_a][site_b] = Complex64::new(amp, 0.0);
        }
    }
    psi
}

/// Output photon-number probabilities from the dense construction.
fn dense_distribution(
    levels: usize,
    n_max: usize,
    tanh_chi: f64,
    setting_a: &AnalyzerSetting,
    setting_b: &AnalyzerSetting,
) -> Vec<Vec<f64>> {
    let dim = levels * levels;
    let psi = pdc_state_matrix(levels, n_max, tanh_chi);
    let w_a = site_unitary(levels, setting_a.theta, setting_a.phi);
    let w_b = site_unitary(levels, setting_b.theta, setting_b.phi);

    // rotated = W_A · psi · W_B^T
    let mut half = vec![vec![Complex64::ZERO; dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            let coef = w_a.get(i, k);
            if coef == Complex64::ZERO {
                continue;
            }
            for j in 0..dim {
                half[i][j] += coef * psi[k][j];
            }
        }
    }
    let mut rotated = vec![vec![Complex64::ZERO; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::ZERO;
            for k in 0..dim {
                acc += half[i][k] * w_b.get(j, k);
            }
            rotated[i][j] = acc;
        }
    }
    rotated
        .into_iter()
        .map(|row| row.into_iter().map(|z| z.norm_sqr()).collect())
        .collect()
}

fn compare_engine_to_dense(tanh_chi: f64, setting_a: AnalyzerSetting, setting_b: AnalyzerSetting) {
    const N_MAX: usize = 4;
    let levels = N_MAX + 1;
    let dense = dense_distribution(levels, N_MAX, tanh_chi, &setting_a, &setting_b);

    let source = PdcSource::with_cutoff(tanh_chi, CutoffPolicy::Fixed(N_MAX)).unwrap();
    let dist = joint_photon_distribution(&source, &setting_a, &setting_b).unwrap();

    for n_ta in 0..levels {
        for n_ra in 0..levels {
            for n_tb in 0..levels {
                for n_rb in 0..levels {
                    let dense_p = dense[n_ta * levels + n_ra][n_tb * levels + n_rb];
                    let engine_p = dist.prob(PhotonConfig {
                        n_ta,
                        n_ra,
                        n_tb,
                        n_rb,
                    });
                    if n_ta + n_ra != n_tb + n_rb || n_ta + n_ra > N_MAX {
                        assert!(
                            dense_p < 1e-20,
                            "dense oracle leaked probability {dense_p} into unbalanced \
                             configuration ({n_ta},{n_ra},{n_tb},{n_rb})"
                        );
                        continue;
                    }
                    assert!(
                        (dense_p - engine_p).abs() < 1e-10,
                        "mismatch at ({n_ta},{n_ra},{n_tb},{n_rb}): dense {dense_p} vs engine {engine_p}"
                    );
                }
            }
        }
    }
}

#[test]
fn engine_matches_dense_oracle_plain_rotations() {
    compare_engine_to_dense(0.6, AnalyzerSetting::new(0.37), AnalyzerSetting::new(1.21));
}

#[test]
fn engine_matches_dense_oracle_with_phases() {
    compare_engine_to_dense(
        0.6,
        AnalyzerSetting::with_phase(0.37, 0.9),
        AnalyzerSetting::with_phase(1.21, -0.4),
    );
}

#[test]
fn engine_matches_dense_oracle_one_sided() {
    compare_engine_to_dense(
        0.3,
        AnalyzerSetting::with_phase(2.5, 1.7),
        AnalyzerSetting::new(0.0),
    );
}

#[test]
fn engine_matches_dense_oracle_weak_source() {
    compare_engine_to_dense(
        0.05,
        AnalyzerSetting::new(std::f64::consts::FRAC_PI_4),
        AnalyzerSetting::new(std::f64::consts::FRAC_PI_8),
    );
}

#[test]
fn dense_site_unitary_is_unitary() {
    let levels = 5;
    let w = site_unitary(levels, 1.1, 0.6);
    let wd = dagger(&w);
    let prod = wd.mul(&w);
    let id = Mat::identity(levels * levels);
    let mut worst = 0.0f64;
    for (a, b) in prod.data.iter().zip(id.data.iter()) {
        worst = worst.max((a - b).norm());
    }
    assert!(worst < 1e-12, "unitarity defect {worst}");
}
