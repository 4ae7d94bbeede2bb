use serde::{Deserialize, Serialize};

use super::{transmission, PiecewisePotential, Pole, PoleKind, ScatteringError};
use crate::oscillator::fbw;

fn check_resonances(poles: &[Pole]) -> Result<(), ScatteringError> {
    if poles.is_empty() {
        return Err(ScatteringError::EmptyPoles);
    }
    if let Some((index, p)) = poles.iter().enumerate().find(|(_, p)| p.kind != PoleKind::Resonance) {
        return Err(ScatteringError::WrongPoleKind { index, kind: p.kind });
    }
    Ok(())
}

/// `ω_N(E) = Σ_n (Γ_n/2)² / ((E − E_n)² + (Γ_n/2)²)` over the given resonances.
pub fn fbw_superposition(poles: &[Pole], energy: f64) -> Result<f64, ScatteringError> {
    check_resonances(poles)?;
    Ok(poles.iter().map(|p| fbw(energy, p.energy(), p.width())).sum())
}

/// Half-width over spacing for one adjacent pair of resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingRatio {
    /// Index of the lower resonance of the pair.
    pub index: usize,
    /// `(Γ_n / 2) / (E_{n+1} − E_n)`.
    pub ratio: f64,
    /// Set when the ratio reaches 1, i.e. the lines overlap.
    pub flagged: bool,
}

/// Narrow-line check for each adjacent pair, resonances taken in the given order.
pub fn spacing_ratios(poles: &[Pole]) -> Result<Vec<SpacingRatio>, ScatteringError> {
    check_resonances(poles)?;
    Ok(poles
        .windows(2)
        .enumerate()
        .map(|(index, w)| {
            let ratio = 0.5 * w[0].width() / (w[1].energy() - w[0].energy()).abs();
            SpacingRatio { index, ratio, flagged: ratio >= 1.0 }
        })
        .collect())
}

/// Root-mean-square of `T(E) − ω_N(E)` on `points` equally spaced energies of `window`.
pub fn fbw_rms(
    v: &PiecewisePotential,
    poles: &[Pole],
    window: (f64, f64),
    points: usize,
) -> Result<f64, ScatteringError> {
    check_resonances(poles)?;
    if points < 2 || !(window.0 > 0.0 && window.1 > window.0) {
        return Err(ScatteringError::InvalidRegion(format!("energy window {window:?} with {points} points")));
    }
    let mut sum = 0.0;
    for i in 0..points {
        let e = window.0 + (window.1 - window.0) * i as f64 / (points - 1) as f64;
        let d = transmission(v, e)? - fbw_superposition(poles, e)?;
        sum += d * d;
    }
    Ok((sum / points as f64).sqrt())
}
