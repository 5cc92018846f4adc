//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or configuration parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No coincidences occur for the requested settings, so the correlation
    /// coefficient is undefined. Callers must not coerce this to zero.
    #[error("no coincidences: correlation coefficient is undefined")]
    NoCoincidence,

    /// A closed-form denominator collapsed below the representable range.
    #[error("degenerate denominator in closed-form evaluation: {0}")]
    DegenerateDenominator(String),

    /// The three Bloch directions of a tomography site are (numerically)
    /// linearly dependent.
    #[error("degenerate tomography basis: |det| = {det:e}")]
    DegenerateBasis {
        /// Determinant of the direction matrix that failed the check.
        det: f64,
    },

    /// The closed form for photon-number-resolving coincidences needs
    /// single-channel coefficients whose derivation is not available; use the
    /// Fock-space pipeline instead.
    #[error("photon-number-resolving closed form unavailable: single-channel coefficients are not derived")]
    PnrClosedFormUnavailable,

    /// Filesystem failure while writing reports or sweep artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
