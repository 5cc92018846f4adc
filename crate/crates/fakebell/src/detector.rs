//! Photodetector outcome model and coincidence postprocessing.
//!
//! Each channel feeds one detector described by an efficiency `η` and a mean
//! noise-count number `N_nc` (dark counts plus background, Poissonian). The
//! probability of registering `n` counts on `m` incident photons is a
//! binomial loss convolved with the Poissonian noise:
//!
//! ```text
//! p(n | m) = Σ_j C(m, j) η^j (1 - η)^{m - j} · e^{-N_nc} N_nc^{n - j} / (n - j)!
//! ```
//!
//! which is the diagonal Fock matrix element of the normally ordered
//! detection operator `:(η n̂ + N_nc)^n / n! · exp(-η n̂ - N_nc):` (the
//! acceptance suite verifies this reduction symbolically in rational
//! arithmetic for small photon numbers).

use crate::error::{Error, Result};
use crate::fock::JointPhotonDistribution;

/// Shared detector parameters. All four detectors in the experiment are
/// assumed identical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    eta: f64,
    n_nc: f64,
}

impl DetectorParams {
    /// Detector with efficiency `eta ∈ [0, 1]` and mean noise counts
    /// `n_nc ≥ 0`.
    pub fn new(eta: f64, n_nc: f64) -> Result<Self> {
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
        Ok(Self { eta, n_nc })
    }

    /// Ideal detector: unit efficiency, no noise counts.
    pub fn ideal() -> Self {
        Self { eta: 1.0, n_nc: 0.0 }
    }

    /// Detection efficiency.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Mean noise counts per detection window.
    pub fn noise_counts(&self) -> f64 {
        self.n_nc
    }
}

/// How raw detector events are mapped to the four coincidence outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostprocessingModel {
    /// Click/no-click detectors; events where both detectors of a site fire
    /// are discarded. This is the postprocessing that produces fake
    /// Bell-parameter enhancements.
    NaiveOnOff,
    /// Click/no-click detectors with double-click events assigned to the two
    /// outcomes of the site with probability 1/2 each (implemented as exact
    /// expectation weights 1/2, 1/2, 1/4 over single- and double-site double
    /// clicks).
    SquashOnOff,
    /// Photon-number-resolving detectors postselected on exactly one count at
    /// each site.
    PhotonNumberResolving,
}

impl PostprocessingModel {
    /// All models, in a fixed presentation order.
    pub const ALL: [PostprocessingModel; 3] = [
        PostprocessingModel::NaiveOnOff,
        PostprocessingModel::SquashOnOff,
        PostprocessingModel::PhotonNumberResolving,
    ];

    /// Stable identifier used in CSV output and on the command line.
    pub fn id(&self) -> &'static str {
        match self {
            PostprocessingModel::NaiveOnOff => "onoff-naive",
            PostprocessingModel::SquashOnOff => "onoff-squash",
            PostprocessingModel::PhotonNumberResolving => "pnr",
        }
    }
}

/// Output channel of one polarization analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Transmitted by the polarizing beam splitter.
    Transmitted,
    /// Reflected by the polarizing beam splitter.
    Reflected,
}

/// The four coincidence probabilities for one pair of analyzer settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoincidenceProbabilities {
    /// P(T_A, T_B)
    pub tt: f64,
    /// P(T_A, R_B)
    pub tr: f64,
    /// P(R_A, T_B)
    pub rt: f64,
    /// P(R_A, R_B)
    pub rr: f64,
}

impl CoincidenceProbabilities {
    /// Probability for one outcome pair.
    pub fn get(&self, site_a: Channel, site_b: Channel) -> f64 {
        match (site_a, site_b) {
            (Channel::Transmitted, Channel::Transmitted) => self.tt,
            (Channel::Transmitted, Channel::Reflected) => self.tr,
            (Channel::Reflected, Channel::Transmitted) => self.rt,
            (Channel::Reflected, Channel::Reflected) => self.rr,
        }
    }

    /// Both sites in the same kind of channel.
    pub fn p_same(&self) -> f64 {
        self.tt + self.rr
    }

    /// Sites in opposite kinds of channel.
    pub fn p_different(&self) -> f64 {
        self.tr + self.rt
    }

    /// Sum of the four outcome probabilities.
    pub fn total(&self) -> f64 {
        self.tt + self.tr + self.rt + self.rr
    }
}

/// Probability of registering exactly `n` counts on `m` incident photons:
/// `j` photons survive the binomial loss and `n - j` noise counts fill in.
pub fn detector_response(m: usize, n: usize, params: &DetectorParams) -> f64 {
    let eta = params.eta;
    let nc = params.n_nc;
    let mut sum = 0.0;
    let mut binom = 1.0f64; // C(m, j)
    for j in 0..=n.min(m) {
        if j > 0 {
            binom *= ((m - j + 1) as f64) / (j as f64);
        }
        sum += binom
            * eta.powi(j as i32)
            * (1.0 - eta).powi((m - j) as i32)
            * poisson_term(nc, n - j);
    }
    sum * (-nc).exp()
}

/// `N^k / k!` without the exponential factor.
fn poisson_term(mean: f64, k: usize) -> f64 {
    let mut term = 1.0;
    for i in 1..=k {
        term *= mean / i as f64;
    }
    term
}

/// Probability that the detector clicks at least once on `m` incident
/// photons: `1 - (1 - η)^m e^{-N_nc}`.
pub fn click_probability(m: usize, params: &DetectorParams) -> f64 {
    1.0 - (1.0 - params.eta).powi(m as i32) * (-params.n_nc).exp()
}

/// Per-channel outcome probabilities tabulated against incident photon
/// number, used when folding a photon-number distribution through the four
/// detectors.
struct ChannelTables {
    /// zero[m] = p(0 | m)
    zero: Vec<f64>,
    /// click[m] = 1 - p(0 | m)
    click: Vec<f64>,
    /// single[m] = p(1 | m)
    single: Vec<f64>,
}

impl ChannelTables {
    fn build(max_photons: usize, params: &DetectorParams) -> Self {
        let eta = params.eta;
        let nc = params.n_nc;
        let noise_scale = (-nc).exp();
        let mut zero = Vec::with_capacity(max_photons + 1);
        let mut click = Vec::with_capacity(max_photons + 1);
        let mut single = Vec::with_capacity(max_photons + 1);
        let mut loss = 1.0; // (1 - η)^m
        for m in 0..=max_photons {
            zero.push(loss * noise_scale);
            click.push(1.0 - loss * noise_scale);
            // Exactly one count: one photon detected and no noise count, or
            // everything lost and a single noise count.
            let one_detected = if m == 0 {
                0.0
            } else {
                m as f64 * eta * (1.0 - eta).powi(m as i32 - 1)
            };
            single.push(noise_scale * (one_detected + loss * nc));
            loss *= 1.0 - eta;
        }
        Self { zero, click, single }
    }
}

/// Fold a joint photon-number distribution through the four detectors and
/// aggregate the outcomes under the chosen postprocessing model.
pub fn coincidence_probabilities(
    dist: &JointPhotonDistribution,
    params: &DetectorParams,
    model: PostprocessingModel,
) -> CoincidenceProbabilities {
    let tables = ChannelTables::build(dist.max_site_photons(), params);
    let mut out = CoincidenceProbabilities::default();
    for (config, p) in dist.entries() {
        if p == 0.0 {
            continue;
        }
        let (ta, ra, tb, rb) = (config.n_ta, config.n_ra, config.n_tb, config.n_rb);
        match model {
            PostprocessingModel::NaiveOnOff => {
                let a_t = tables.click[ta] * tables.zero[ra];
                let a_r = tables.click[ra] * tables.zero[ta];
                let b_t = tables.click[tb] * tables.zero[rb];
                let b_r = tables.click[rb] * tables.zero[tb];
                out.tt += p * a_t * b_t;
                out.tr += p * a_t * b_r;
                out.rt += p * a_r * b_t;
                out.rr += p * a_r * b_r;
            }
            PostprocessingModel::SquashOnOff => {
                let a_t = tables.click[ta] * tables.zero[ra];
                let a_r = tables.click[ra] * tables.zero[ta];
                let b_t = tables.click[tb] * tables.zero[rb];
                let b_r = tables.click[rb] * tables.zero[tb];
                let a_dbl = tables.click[ta] * tables.click[ra];
                let b_dbl = tables.click[tb] * tables.click[rb];
                // Double clicks split evenly between the site's outcomes.
                let a_t_eff = a_t + 0.5 * a_dbl;
                let a_r_eff = a_r + 0.5 * a_dbl;
                let b_t_eff = b_t + 0.5 * b_dbl;
                let b_r_eff = b_r + 0.5 * b_dbl;
                out.tt += p * a_t_eff * b_t_eff;
                out.tr += p * a_t_eff * b_r_eff;
                out.rt += p * a_r_eff * b_t_eff;
                out.rr += p * a_r_eff * b_r_eff;
            }
            PostprocessingModel::PhotonNumberResolving => {
                let a_t = tables.single[ta] * tables.zero[ra];
                let a_r = tables.single[ra] * tables.zero[ta];
                let b_t = tables.single[tb] * tables.zero[rb];
                let b_r = tables.single[rb] * tables.zero[tb];
                out.tt += p * a_t * b_t;
                out.tr += p * a_t * b_r;
                out.rt += p * a_r * b_t;
                out.rr += p * a_r * b_r;
            }
        }
    }
    out
}

/// Probability that at least one detector clicks at each site, computed
/// directly from the photon-number distribution. The squash model's four
/// outcome probabilities sum to exactly this.
pub fn both_sites_click_probability(
    dist: &JointPhotonDistribution,
    params: &DetectorParams,
) -> f64 {
    let tables = ChannelTables::build(dist.max_site_photons(), params);
    let mut total = 0.0;
    for (config, p) in dist.entries() {
        if p == 0.0 {
            continue;
        }
        let a_any = 1.0 - tables.zero[config.n_ta] * tables.zero[config.n_ra];
        let b_any = 1.0 - tables.zero[config.n_tb] * tables.zero[config.n_rb];
        total += p * a_any * b_any;
    }
    total
}
