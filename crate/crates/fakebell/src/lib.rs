//! Simulation and analysis of fake CHSH Bell-parameter violations.
//!
//! A parametric-down-conversion source emits polarization-entangled photon
//! pairs; each site analyzes them with a rotatable polarizer, a phase
//! shifter, and a pair of imperfect detectors. This crate computes the exact
//! coincidence statistics of that experiment in a truncated Fock space and
//! studies what the data postprocessing does to them:
//!
//! - **Naive on-off postprocessing** (discard events where both detectors of
//!   a site click) can push the measured CHSH Bell parameter *above* the
//!   quantum bound 2√2 — a fake violation caused entirely by the
//!   postprocessing, not by physics.
//! - **Squash postprocessing** (assign double clicks to the two outcomes
//!   with probability 1/2) restores consistency and keeps the Bell parameter
//!   within the quantum bound.
//! - **Photon-number-resolving detectors** avoid the effect altogether.
//! - Feeding naively postprocessed correlations into a linear two-qubit
//!   reconstruction yields basis-dependent operators that can fail to be
//!   positive semidefinite.
//!
//! Analytic coincidence formulas are implemented alongside the Fock-space
//! pipeline and cross-validated against it; where the two disagree the
//! pipeline is authoritative (see [`validation`]).
//!
//! # Quick start
//!
//! ```
//! use fakebell::{
//!     chsh::maximize_bell,
//!     detector::{DetectorParams, PostprocessingModel},
//!     fock::PdcSource,
//! };
//!
//! // Ideal detectors, moderately pumped source, naive postprocessing:
//! let source = PdcSource::new(0.5)?;
//! let params = DetectorParams::ideal();
//! let result = maximize_bell(&source, &params, PostprocessingModel::NaiveOnOff)?;
//! assert!(result.bell_value > 2.0 * std::f64::consts::SQRT_2); // fake violation
//!
//! let squashed = maximize_bell(&source, &params, PostprocessingModel::SquashOnOff)?;
//! assert!(squashed.bell_value <= 2.0 * std::f64::consts::SQRT_2 + 1e-9);
//! # Ok::<(), fakebell::error::Error>(())
//! ```
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```sh
//! cargo run --release --example pdc_state            # source expansion & truncation
//! cargo run --release --example detector_response    # detector outcome model
//! cargo run --release --example fake_violation       # Bell parameter beyond 2√2
//! cargo run --release --example squash_restores_bound
//! cargo run --release --example pnr_comparison       # number-resolving detectors
//! cargo run --release --example closed_form_check    # analytic formulas vs pipeline
//! cargo run --release --example bell_sweep           # CSV sweep + plot script
//! cargo run --release --example tomography_negativity
//! ```
//!
//! # Command line
//!
//! The `fakebell` binary exposes the sweeps behind a thin CLI:
//!
//! ```sh
//! fakebell sweep-bell --model onoff-naive --eta 0.9 --noise 1e-6 \
//!     --tanh-chi 0.05:0.7:0.05 --out sweep.csv
//! fakebell tomography-scan --basis fig4b --eta 0.6
//! fakebell optimize-bell --tanh-chi 0.5 --eta 1 --noise 0
//! fakebell validate
//! ```
//!
//! # Module map
//!
//! - [`fock`] — source expansion, analyzer unitaries, joint photon-number
//!   distributions.
//! - [`detector`] — detector outcome model and coincidence postprocessing.
//! - [`closed_form`] — analytic coincidence/correlation formulas.
//! - [`chsh`] — correlations, the Bell parameter, angle optimization.
//! - [`tomography`] — two-qubit reconstruction and its spectrum.
//! - [`validation`] — analytic-vs-pipeline cross-checks on a fixed grid.
//! - [`sweep`] — CSV sweeps and plot-script emission.
//! - [`cli`] — command-line front end.

pub mod chsh;
pub mod cli;
pub mod closed_form;
pub mod detector;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod simplex;
pub mod sweep;
pub mod tomography;
pub mod validation;

pub use error::{Error, Result};
