//! Tiny fixed-size linear algebra: 3×3 real inversion by adjugate and the
//! eigenvalues of a 4×4 complex Hermitian matrix. The problem sizes here
//! never justify an external solver.

use num_complex::Complex64;

/// Determinant of a real 3×3 matrix.
pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Inverse of a real 3×3 matrix via the adjugate, or `None` when the
/// determinant magnitude does not exceed `det_floor`.
pub fn invert3(m: &[[f64; 3]; 3], det_floor: f64) -> Option<[[f64; 3]; 3]> {
    let det = det3(m);
    if det.abs() <= det_floor {
        return None;
    }
    let inv_det = 1.0 / det;
    let cof = |r1: usize, c1: usize, r2: usize, c2: usize| m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
    Some([
        [
            cof(1, 1, 2, 2) * inv_det,
            -cof(0, 1, 2, 2) * inv_det,
            cof(0, 1, 1, 2) * inv_det,
        ],
        [
            -cof(1, 0, 2, 2) * inv_det,
            cof(0, 0, 2, 2) * inv_det,
            -cof(0, 0, 1, 2) * inv_det,
        ],
        [
            cof(1, 0, 2, 1) * inv_det,
            -cof(0, 0, 2, 1) * inv_det,
            cof(0, 0, 1, 1) * inv_det,
        ],
    ])
}

/// Eigenvalues of a 4×4 complex Hermitian matrix, ascending.
///
/// The matrix `X + iY` is embedded as the real symmetric `[[X, -Y], [Y, X]]`,
/// whose spectrum is that of the original with every eigenvalue doubled; a
/// cyclic Jacobi sweep then drives the 8×8 problem to machine precision.
pub fn hermitian_eigenvalues_4(a: &[[Complex64; 4]; 4]) -> [f64; 4] {
    const N: usize = 8;
    let mut m = [[0.0f64; N]; N];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i][j].re;
            m[i + 4][j + 4] = a[i][j].re;
            m[i][j + 4] = -a[i][j].im;
            m[i + 4][j] = a[i][j].im;
        }
    }

    let off_norm = |m: &[[f64; N]; N]| -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += m[i][j] * m[i][j];
                }
            }
        }
        s.sqrt()
    };
    let scale: f64 = (0..N)
        .map(|i| (0..N).map(|j| m[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        if off_norm(&m) <= 1e-15 * scale {
            break;
        }
        for p in 0..N - 1 {
            for q in p + 1..N {
                let apq = m[p][q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                // Classic Jacobi rotation annihilating m[p][q].
                let tau = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..N {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..N {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }

    let mut diag: Vec<f64> = (0..N).map(|i| m[i][i]).collect();
    diag.sort_by(f64::total_cmp);
    // Doubled spectrum: take one representative of each pair.
    [diag[0], diag[2], diag[4], diag[6]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverts_identity_and_roundtrips() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(invert3(&id, 1e-10).unwrap(), id);

        let m = [[2.0, 1.0, 0.5], [0.3, -1.0, 2.0], [0.0, 4.0, 1.0]];
        let inv = invert3(&m, 1e-10).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let prod: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_returns_none() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]];
        assert!(invert3(&m, 1e-10).is_none());
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let mut a = [[Complex64::ZERO; 4]; 4];
        for (i, v) in [0.7, -1.2, 3.0, 0.7].iter().enumerate() {
            a[i][i] = c(*v, 0.0);
        }
        let eigs = hermitian_eigenvalues_4(&a);
        assert!((eigs[0] + 1.2).abs() < 1e-12);
        assert!((eigs[1] - 0.7).abs() < 1e-12);
        assert!((eigs[2] - 0.7).abs() < 1e-12);
        assert!((eigs[3] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn known_spectrum_survives_random_unitary_conjugation() {
        // Build V D V† from a spectrum and a unitary composed of complex
        // Givens rotations, then recover the spectrum.
        let mut rng_state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..50 {
            let spectrum = [
                next() * 4.0 - 2.0,
                next() * 4.0 - 2.0,
                next() * 4.0 - 2.0,
                next() * 4.0 - 2.0,
            ];
            let mut v = [[Complex64::ZERO; 4]; 4];
            for i in 0..4 {
                v[i][i] = c(1.0, 0.0);
            }
            for p in 0..3 {
                for q in p + 1..4 {
                    let angle = next() * std::f64::consts::TAU;
                    let phase = next() * std::f64::consts::TAU;
                    let (cs, sn) = (angle.cos(), angle.sin());
                    let e = Complex64::from_polar(1.0, phase);
                    for row in v.iter_mut() {
                        let a = row[p];
                        let b = row[q];
                        row[p] = a * cs + b * e * sn;
                        row[q] = -a * e.conj() * sn + b * cs;
                    }
                }
            }
            let mut a = [[Complex64::ZERO; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = Complex64::ZERO;
                    for k in 0..4 {
                        acc += v[i][k] * spectrum[k] * v[j][k].conj();
                    }
                    a[i][j] = acc;
                }
            }
            let mut expect = spectrum;
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let eigs = hermitian_eigenvalues_4(&a);
            for (got, want) in eigs.iter().zip(expect.iter()) {
                assert!(
                    (got - want).abs() < 1e-10,
                    "trial {trial}: got {got}, want {want}"
                );
            }
        }
    }
}
