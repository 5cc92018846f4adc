//! Truncated Fock-space engine for the entangled-pair source and the
//! polarization analyzers.
//!
//! The source emits photon pairs into four modes (horizontal/vertical at two
//! sites). Its state decomposes into pair-number blocks: in block `n` each
//! site carries exactly `n` photons, and a polarization analyzer acts within
//! the block as a unitary on the `n`-photon sector of the two local modes.
//! This keeps block `n` at `(n + 1)^2` amplitudes and makes the expansion
//! exact up to an analytically controlled pair-number cutoff.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tail tolerance for the adaptive pair-number cutoff. Small enough
/// that truncation is negligible against every comparison tolerance used by
/// the analysis layers.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Hard ceiling on the pair-number expansion; sector construction stays at
/// machine precision well past this, but cost grows with the fourth power.
pub const MAX_PAIR_NUMBER: usize = 512;

/// Pair-number truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    /// Keep pair numbers `0..=n`.
    Fixed(usize),
    /// Keep the smallest range whose neglected weight is at most
    /// `tail_tolerance`.
    Adaptive {
        /// Maximum probability mass allowed in the discarded tail.
        tail_tolerance: f64,
    },
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::Adaptive {
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

/// Down-conversion source configuration: interaction strength `tanh χ` and a
/// pair-number truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcSource {
    tanh_chi: f64,
    cutoff: CutoffPolicy,
}

impl PdcSource {
    /// Source with the default adaptive cutoff.
    pub fn new(tanh_chi: f64) -> Result<Self> {
        Self::with_cutoff(tanh_chi, CutoffPolicy::default())
    }

    /// Source with an explicit truncation policy.
    pub fn with_cutoff(tanh_chi: f64, cutoff: CutoffPolicy) -> Result<Self> {
        if !tanh_chi.is_finite() || !(0.0..1.0).contains(&tanh_chi) {
            return Err(Error::InvalidParameter(format!(
                "tanh_chi must lie in [0, 1), got {tanh_chi}"
            )));
        }
        match cutoff {
            CutoffPolicy::Fixed(n) if n > MAX_PAIR_NUMBER => {
                return Err(Error::InvalidParameter(format!(
                    "cutoff {n} exceeds the supported maximum {MAX_PAIR_NUMBER}"
                )));
            }
            CutoffPolicy::Adaptive { tail_tolerance } => {
                if !tail_tolerance.is_finite() || tail_tolerance <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "tail tolerance must be positive, got {tail_tolerance}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { tanh_chi, cutoff })
    }

    /// Interaction strength `tanh χ`.
    pub fn tanh_chi(&self) -> f64 {
        self.tanh_chi
    }

    /// Truncation policy.
    pub fn cutoff(&self) -> CutoffPolicy {
        self.cutoff
    }

    /// Probability weight of the `n`-pair block:
    /// `(n + 1) tanh^{2n}χ (1 - tanh²χ)²`.
    pub fn pair_weight(&self, n: usize) -> f64 {
        let x = self.tanh_chi * self.tanh_chi;
        (n as f64 + 1.0) * x.powi(n as i32) * (1.0 - x) * (1.0 - x)
    }

    /// Weight neglected when truncating after block `n_max`, from the closed
    /// form of the geometric tail:
    /// `x^{n+1} [(n + 2) - (n + 1) x]` with `x = tanh²χ`.
    pub fn truncation_deficit(&self, n_max: usize) -> f64 {
        let x = self.tanh_chi * self.tanh_chi;
        let n = n_max as f64;
        (x.powi(n_max as i32 + 1) * ((n + 2.0) - (n + 1.0) * x)).max(0.0)
    }

    /// Resolve the cutoff policy to a concrete maximum pair number.
    pub fn max_pairs(&self) -> Result<usize> {
        match self.cutoff {
            CutoffPolicy::Fixed(n) => Ok(n),
            CutoffPolicy::Adaptive { tail_tolerance } => {
                for n in 0..=MAX_PAIR_NUMBER {
                    if self.truncation_deficit(n) <= tail_tolerance {
                        return Ok(n);
                    }
                }
                Err(Error::InvalidParameter(format!(
                    "adaptive cutoff for tanh_chi = {} needs more than {MAX_PAIR_NUMBER} \
                     pair-number blocks; lower tanh_chi or relax the tail tolerance",
                    self.tanh_chi
                )))
            }
        }
    }
}

/// One polarization-analyzer setting: half-wave-plate rotation `theta` and
/// phase-shifter angle `phi` on the horizontal input mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSetting {
    /// Rotation angle in radians. Output probabilities are π-periodic in it.
    pub theta: f64,
    /// Phase-shifter angle in radians (2π-periodic).
    pub phi: f64,
}

impl AnalyzerSetting {
    /// Setting with no phase shifter.
    pub fn new(theta: f64) -> Self {
        Self { theta, phi: 0.0 }
    }

    /// Setting with an explicit phase-shifter angle.
    pub fn with_phase(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    fn is_exact_identity(&self) -> bool {
        self.theta == 0.0 && self.phi == 0.0
    }
}

/// One pair-number block of the four-mode state.
///
/// Amplitudes are stored row-major as an `(n + 1) × (n + 1)` matrix;
/// `amplitude(a, b)` is the coefficient of the state with `a` photons in the
/// first mode at site A and `b` photons in the first mode at site B, where
/// "first mode" means horizontal before an analyzer is applied and the
/// transmitted channel afterwards (the other local mode holds the remaining
/// `n - a` and `n - b` photons).
#[derive(Debug, Clone, PartialEq)]
pub struct PairBlockState {
    n: usize,
    weight: f64,
    amps: Vec<Complex64>,
}

impl PairBlockState {
    /// Build a block from raw amplitudes. The amplitude vector must have
    /// length `(n + 1)^2` and unit norm within `1e-12`.
    pub fn from_amplitudes(n: usize, weight: f64, amps: Vec<Complex64>) -> Result<Self> {
        let dim = n + 1;
        if amps.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "block {n} needs {} amplitudes, got {}",
                dim * dim,
                amps.len()
            )));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "block weight must be a non-negative real, got {weight}"
            )));
        }
        let block = Self { n, weight, amps };
        let norm = block.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "block {n} amplitudes have norm² = {norm}, expected 1"
            )));
        }
        Ok(block)
    }

    /// Pair number of this block (photons per site).
    pub fn pair_number(&self) -> usize {
        self.n
    }

    /// Probability weight carried by this block.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Per-site dimension, `n + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Amplitude for `a` photons in the first mode at site A and `b` photons
    /// in the first mode at site B.
    pub fn amplitude(&self, a: usize, b: usize) -> Complex64 {
        self.amps[a * self.dim() + b]
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Expand the source state into its pair-number blocks.
///
/// Block `n` carries weight `(n + 1) tanh^{2n}χ (1 - tanh²χ)²` and internal
/// amplitudes `(-1)^m / √(n + 1)` on the configurations with `n - m`
/// horizontal photons at site A and `m` horizontal photons at site B
/// (`m = 0..=n`); everything else vanishes.
pub fn build_pdc_state(source: &PdcSource) -> Result<Vec<PairBlockState>> {
    let n_max = source.max_pairs()?;
    let mut blocks = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let dim = n + 1;
        let mut amps = vec![Complex64::ZERO; dim * dim];
        let scale = 1.0 / ((n as f64 + 1.0).sqrt());
        for m in 0..=n {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            // a = n - m horizontal photons at site A, b = m at site B.
            amps[(n - m) * dim + m] = Complex64::new(sign * scale, 0.0);
        }
        blocks.push(PairBlockState {
            n,
            weight: source.pair_weight(n),
            amps,
        });
    }
    Ok(blocks)
}

/// The analyzer unitaries for every photon-number sector up to a cutoff.
///
/// Sector `n` is the `(n + 1) × (n + 1)` unitary induced by the analyzer
/// input-output relations
/// `a_T = e^{iφ} a_H cosθ + a_V sinθ`, `a_R = -e^{iφ} a_H sinθ + a_V cosθ`,
/// stored row-major with `u[k * (n + 1) + h]` the amplitude for `h`
/// horizontal photons ending up as `k` transmitted photons. Sectors are
/// built by adding one photon at a time, which stays numerically stable far
/// beyond the cutoffs in use; the phase enters only as a column factor
/// `e^{iφh}` on a real rotation core.
pub(crate) struct AnalyzerUnitaries {
    sectors: Vec<Vec<Complex64>>,
}

impl AnalyzerUnitaries {
    pub(crate) fn build(n_max: usize, setting: &AnalyzerSetting) -> Self {
        let real = real_sectors(n_max, setting.theta);
        let sectors = real
            .into_iter()
            .map(|sector| {
                let dim = (sector.len() as f64).sqrt().round() as usize;
                let mut u = vec![Complex64::ZERO; sector.len()];
                if setting.phi == 0.0 {
                    for (dst, src) in u.iter_mut().zip(sector.iter()) {
                        *dst = Complex64::new(*src, 0.0);
                    }
                } else {
                    for h in 0..dim {
                        let phase = Complex64::from_polar(1.0, setting.phi * h as f64);
                        for k in 0..dim {
                            u[k * dim + h] = phase * sector[k * dim + h];
                        }
                    }
                }
                u
            })
            .collect();
        Self { sectors }
    }

    pub(crate) fn sector(&self, n: usize) -> &[Complex64] {
        &self.sectors[n]
    }
}

/// Real (`φ = 0`) sector rotations for `n = 0..=n_max`.
///
/// Entries of a large-`n` sector at a generic angle are alternating sums
/// with severe cancellation, so the matrices are first built at an angle
/// halved until it is small (where the photon-append recursion is benign)
/// and then squared back up; rotations of the same sector compose exactly,
/// and every factor is unitary, so rounding stays near machine level for
/// every supported cutoff.
fn real_sectors(n_max: usize, theta: f64) -> Vec<Vec<f64>> {
    // Amplitudes have period 2π in θ.
    let mut reduced = theta.rem_euclid(std::f64::consts::TAU);
    if reduced > std::f64::consts::PI {
        reduced -= std::f64::consts::TAU;
    }
    let mut halvings = 0u32;
    let mut base_angle = reduced;
    while base_angle.abs() > 0.0625 && halvings < 8 {
        base_angle *= 0.5;
        halvings += 1;
    }
    let mut sectors = small_angle_sectors(n_max, base_angle);
    for _ in 0..halvings {
        for sector in sectors.iter_mut() {
            let dim = (sector.len() as f64).sqrt().round() as usize;
            *sector = square_sector(sector, dim);
        }
    }
    sectors
}

fn square_sector(u: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let lhs = u[i * dim + k];
            if lhs == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += lhs * u[k * dim + j];
            }
        }
    }
    out
}

/// Sector rotations by one photon-append recursion: sector `n`'s column `h`
/// is sector `n - 1`'s column `h - 1` (or `h = 0`) with one more horizontal
/// (vertical) photon pushed through the analyzer. Numerically benign only
/// for small angles, where the subtraction terms carry a small factor.
fn small_angle_sectors(n_max: usize, theta: f64) -> Vec<Vec<f64>> {
    let c = theta.cos();
    let s = theta.sin();
    let sqrt: Vec<f64> = (0..=n_max + 1).map(|k| (k as f64).sqrt()).collect();
    let mut sectors: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    sectors.push(vec![1.0]);
    for n in 1..=n_max {
        let dim = n + 1;
        let prev = &sectors[n - 1];
        let mut u = vec![0.0; dim * dim];
        // Column h = 0: append a vertical photon, a_V† -> s a_T† + c a_R†.
        for k in 0..dim {
            let from_t = if k >= 1 { s * sqrt[k] * prev[(k - 1) * n] } else { 0.0 };
            let from_r = if k < n { c * sqrt[n - k] * prev[k * n] } else { 0.0 };
            u[k * dim] = (from_t + from_r) / sqrt[n];
        }
        // Columns h >= 1: append a horizontal photon,
        // a_H† -> c a_T† - s a_R† (phase handled at the complex layer).
        for h in 1..dim {
            for k in 0..dim {
                let from_t = if k >= 1 {
                    c * sqrt[k] * prev[(k - 1) * n + (h - 1)]
                } else {
                    0.0
                };
                let from_r = if k < n {
                    -s * sqrt[n - k] * prev[k * n + (h - 1)]
                } else {
                    0.0
                };
                u[k * dim + h] = (from_t + from_r) / sqrt[h];
            }
        }
        sectors.push(u);
    }
    sectors
}

/// Unitary induced on the `n`-photon sector of two local modes by the
/// analyzer input-output relations
/// `a_T = e^{iφ} a_H cosθ + a_V sinθ`, `a_R = -e^{iφ} a_H sinθ + a_V cosθ`,
/// stored row-major with `u[k * (n + 1) + h]` the amplitude for `h`
/// horizontal photons ending up as `k` transmitted photons.
pub fn sector_rotation(n: usize, setting: &AnalyzerSetting) -> Vec<Complex64> {
    AnalyzerUnitaries::build(n, setting)
        .sectors
        .pop()
        .expect("at least the vacuum sector")
}

fn rotate_block_amps(
    amps: &[Complex64],
    dim: usize,
    site_a: Option<&[Complex64]>,
    site_b: Option<&[Complex64]>,
) -> Vec<Complex64> {
    let mut amps = amps.to_vec();
    if let Some(u) = site_a {
        let mut rotated = vec![Complex64::ZERO; dim * dim];
        for k in 0..dim {
            for h in 0..dim {
                let coef = u[k * dim + h];
                if coef == Complex64::ZERO {
                    continue;
                }
                for b in 0..dim {
                    rotated[k * dim + b] += coef * amps[h * dim + b];
                }
            }
        }
        amps = rotated;
    }
    if let Some(u) = site_b {
        let mut rotated = vec![Complex64::ZERO; dim * dim];
        for a in 0..dim {
            for k in 0..dim {
                let mut acc = Complex64::ZERO;
                for h in 0..dim {
                    acc += amps[a * dim + h] * u[k * dim + h];
                }
                rotated[a * dim + k] = acc;
            }
        }
        amps = rotated;
    }
    amps
}

/// Apply one analyzer per site to a pair block, re-expressing its amplitudes
/// in the transmitted/reflected basis. Per-site photon number is conserved;
/// the norm changes only at rounding level.
pub fn apply_analyzer(
    block: &PairBlockState,
    setting_a: &AnalyzerSetting,
    setting_b: &AnalyzerSetting,
) -> PairBlockState {
    let ua = (!setting_a.is_exact_identity()).then(|| sector_rotation(block.n, setting_a));
    let ub = (!setting_b.is_exact_identity()).then(|| sector_rotation(block.n, setting_b));
    PairBlockState {
        n: block.n,
        weight: block.weight,
        amps: rotate_block_amps(&block.amps, block.dim(), ua.as_deref(), ub.as_deref()),
    }
}

/// Photon numbers in the four output channels for one distribution entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonConfig {
    /// Transmitted channel, site A.
    pub n_ta: usize,
    /// Reflected channel, site A.
    pub n_ra: usize,
    /// Transmitted channel, site B.
    pub n_tb: usize,
    /// Reflected channel, site B.
    pub n_rb: usize,
}

#[derive(Debug, Clone)]
struct BlockDistribution {
    n: usize,
    /// Row-major (n+1)×(n+1): probs[a][b] for a transmitted photons at A and
    /// b at B.
    probs: Vec<f64>,
}

/// Exact joint photon-number distribution over the four analyzer output
/// channels, block-diagonal in the pair number.
#[derive(Debug, Clone)]
pub struct JointPhotonDistribution {
    blocks: Vec<BlockDistribution>,
    truncation_deficit: f64,
}

impl JointPhotonDistribution {
    /// Probability mass lost to the pair-number cutoff (analytic tail).
    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    /// Total retained probability mass; equals `1 - truncation_deficit` up to
    /// rounding.
    pub fn total_mass(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.probs.iter().sum::<f64>())
            .sum()
    }

    /// Largest per-site photon number present.
    pub fn max_site_photons(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.n)
    }

    /// Probability of one output configuration. Configurations that mix pair
    /// numbers (site totals differing) carry zero probability.
    pub fn prob(&self, config: PhotonConfig) -> f64 {
        let n = config.n_ta + config.n_ra;
        if config.n_tb + config.n_rb != n {
            return 0.0;
        }
        match self.blocks.get(n) {
            Some(block) => block.probs[config.n_ta * (n + 1) + config.n_tb],
            None => 0.0,
        }
    }

    /// Iterate over all retained entries as `(configuration, probability)`.
    pub fn entries(&self) -> impl Iterator<Item = (PhotonConfig, f64)> + '_ {
        self.blocks.iter().flat_map(|block| {
            let n = block.n;
            let dim = n + 1;
            block.probs.iter().enumerate().map(move |(idx, &p)| {
                let a = idx / dim;
                let b = idx % dim;
                (
                    PhotonConfig {
                        n_ta: a,
                        n_ra: n - a,
                        n_tb: b,
                        n_rb: n - b,
                    },
                    p,
                )
            })
        })
    }

    /// Distribution of the total photon number at site A (marginal over the
    /// two local channels and over site B).
    pub fn site_a_total_distribution(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.probs.iter().sum::<f64>())
            .collect()
    }
}

/// Build the source state, apply the two analyzers, and collect the joint
/// output photon-number distribution.
pub fn joint_photon_distribution(
    source: &PdcSource,
    setting_a: &AnalyzerSetting,
    setting_b: &AnalyzerSetting,
) -> Result<JointPhotonDistribution> {
    let blocks = build_pdc_state(source)?;
    Ok(distribution_from_blocks(&blocks, setting_a, setting_b, source))
}

/// Same as [`joint_photon_distribution`], reusing prebuilt source blocks.
pub(crate) fn distribution_from_blocks(
    blocks: &[PairBlockState],
    setting_a: &AnalyzerSetting,
    setting_b: &AnalyzerSetting,
    source: &PdcSource,
) -> JointPhotonDistribution {
    let n_max = blocks.last().map_or(0, |b| b.n);
    let ua = (!setting_a.is_exact_identity()).then(|| AnalyzerUnitaries::build(n_max, setting_a));
    let ub = (!setting_b.is_exact_identity()).then(|| AnalyzerUnitaries::build(n_max, setting_b));
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        let dim = block.dim();
        let amps = rotate_block_amps(
            &block.amps,
            dim,
            ua.as_ref().map(|u| u.sector(block.n)),
            ub.as_ref().map(|u| u.sector(block.n)),
        );
        let mut probs = vec![0.0; dim * dim];
        for (dst, amp) in probs.iter_mut().zip(amps.iter()) {
            *dst = block.weight * amp.norm_sqr();
        }
        out.push(BlockDistribution { n: block.n, probs });
    }
    JointPhotonDistribution {
        blocks: out,
        truncation_deficit: source.truncation_deficit(n_max),
    }
}
