//! One-dimensional scattering on piecewise-constant potentials (ħ = 2m = 1, ε = k²).

mod fbw;
mod poles;
mod potential;
mod transfer;
mod wave;

pub use fbw::{fbw_rms, fbw_superposition, spacing_ratios, SpacingRatio};
pub use poles::{find_poles, riemann_sheet_label, KRegion, Pole, PoleKind, PoleSearch, PoleSet, Sheet};
pub use potential::{PiecewisePotential, FIG5_DEPTH, FIG5_WIDTH};
pub use transfer::{
    interior_propagator, jost_denominator, local_jost, s_matrix_determinant, segment_propagator,
    solve_scattering, transfer_matrix, transmission, Mat2, ScatteringSolution, TransferMatrix,
};
pub use wave::{wronskian, PiecewiseWave, SegmentAmplitudes, SegmentForm, WavePoint, WaveSegment};

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScatteringError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("non-finite wavenumber")]
    NonFiniteWavenumber,
    #[error("singular matching at k = {k} (modulus {modulus:e})")]
    SingularMatching { k: Complex64, modulus: f64 },
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("pole {index} is {kind:?}, expected a resonance")]
    WrongPoleKind { index: usize, kind: PoleKind },
    #[error("no poles given")]
    EmptyPoles,
    #[error("k = {k} does not square to epsilon = {epsilon}")]
    InconsistentPair { epsilon: Complex64, k: Complex64 },
    #[error("invalid search region: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
