//! Lorentzian energy distributions, Fourier pairs of transient signals and the
//! survival amplitude of a decaying state (ħ = 1).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{integrate_adaptive, NumericsError, Tolerances};

/// Half-width of the energy window, in units of Γ, used by the numeric survival amplitude.
pub const SURVIVAL_WINDOW_WIDTHS: f64 = 400.0;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DecayError {
    #[error("invalid decay parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("survival amplitude requested at negative time {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FbwNormalization {
    /// `(1/π) (Γ/2)² / (a² + (Γ/2)²)`, peak `1/π`.
    #[default]
    Squared,
    /// `(1/π) (Γ/2) / (a² + (Γ/2)²)`, unit area.
    UnitArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockDistribution {
    pub center: f64,
    /// Full width Γ.
    pub width: f64,
    pub normalization: FbwNormalization,
}

impl FockDistribution {
    pub fn new(center: f64, width: f64, normalization: FbwNormalization) -> Result<Self, DecayError> {
        if !center.is_finite() {
            return Err(DecayError::InvalidParameter("center energy must be finite"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(DecayError::InvalidParameter("width must be positive"));
        }
        Ok(Self { center, width, normalization })
    }

    /// Complex pole `ε = E0 − iΓ/2`.
    pub fn pole(&self) -> Complex64 {
        Complex64::new(self.center, -0.5 * self.width)
    }

    fn numerator(&self) -> f64 {
        let half = 0.5 * self.width;
        match self.normalization {
            FbwNormalization::Squared => half * half / PI,
            FbwNormalization::UnitArea => half / PI,
        }
    }

    /// `∫ ω dE` over the real line.
    pub fn total_weight(&self) -> f64 {
        self.numerator() * PI / (0.5 * self.width)
    }
}

pub fn fock_omega(d: &FockDistribution, energy: f64) -> f64 {
    let half = 0.5 * d.width;
    d.numerator() / ((energy - d.center).powi(2) + half * half)
}

/// `C(E) = (Γ/2) / (√π (E − ε))`, so that `|C|²` is the squared-mode distribution.
pub fn expansion_coefficient(d: &FockDistribution, energy: f64) -> Complex64 {
    Complex64::new(0.5 * d.width / PI.sqrt(), 0.0) / (Complex64::new(energy, 0.0) - d.pole())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalMethod {
    ClosedForm,
    Numeric,
}

/// Survival amplitude `T(t) = ∫ ω(E) e^{−iEt} dE` for `t ≥ 0`.
///
/// The closed form is `∫ω · e^{−iεt}`. The numeric route integrates a window of
/// `±400Γ` (widened to `±40/t` for short times) and adds the two Lorentzian tails
/// analytically: exactly through arctan at `t = 0`, otherwise by three rounds of
/// integration by parts on the oscillatory kernel.
pub fn survival_amplitude(
    d: &FockDistribution,
    t: f64,
    method: SurvivalMethod,
    tol: &Tolerances,
) -> Result<Complex64, DecayError> {
    if !(t >= 0.0) {
        return Err(DecayError::NegativeTime(t));
    }
    match method {
        SurvivalMethod::ClosedForm => Ok(d.total_weight() * (-Complex64::i() * d.pole() * t).exp()),
        SurvivalMethod::Numeric => survival_numeric(d, t, tol),
    }
}

fn survival_numeric(d: &FockDistribution, t: f64, tol: &Tolerances) -> Result<Complex64, DecayError> {
    let half = 0.5 * d.width;
    let c = d.numerator();
    let mut reach = SURVIVAL_WINDOW_WIDTHS * d.width;
    if t > 0.0 {
        reach = reach.max(40.0 / t);
    }
    // Integrate in the offset a = E − E0 and restore the carrier phase afterwards.
    let core = integrate_adaptive(
        |a| Complex64::new(c / (a * a + half * half), 0.0) * Complex64::new(0.0, -a * t).exp(),
        -reach,
        reach,
        tol,
    )?
    .value;
    let tails = if t == 0.0 {
        Complex64::new(2.0 * c / half * (0.5 * PI - (reach / half).atan()), 0.0)
    } else {
        let g = |a: f64| c / (a * a + half * half);
        let g1 = |a: f64| -2.0 * a * c / (a * a + half * half).powi(2);
        let g2 = |a: f64| c * (6.0 * a * a - 2.0 * half * half) / (a * a + half * half).powi(3);
        let it = Complex64::new(0.0, t);
        let series = |a: f64| g(a) / it + g1(a) / (it * it) + g2(a) / (it * it * it);
        let upper = Complex64::new(0.0, -reach * t).exp() * series(reach);
        let lower = -Complex64::new(0.0, reach * t).exp() * series(-reach);
        upper + lower
    };
    Ok((core + tails) * Complex64::new(0.0, -d.center * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientSignal {
    pub amplitude: f64,
    /// Energy damping rate γ.
    pub damping: f64,
    pub carrier_freq: f64,
}

impl TransientSignal {
    pub fn new(amplitude: f64, damping: f64, carrier_freq: f64) -> Result<Self, DecayError> {
        if !amplitude.is_finite() {
            return Err(DecayError::InvalidParameter("amplitude must be finite"));
        }
        if !(damping.is_finite() && damping > 0.0) {
            return Err(DecayError::InvalidParameter("damping must be positive"));
        }
        if !(carrier_freq.is_finite() && carrier_freq > 0.0) {
            return Err(DecayError::InvalidParameter("carrier frequency must be positive"));
        }
        Ok(Self { amplitude, damping, carrier_freq })
    }

    /// Envelope `A(t) = φ0 Θ(t) e^{−γt/2}`, with `Θ(0) = 1`.
    pub fn envelope(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.amplitude * (-0.5 * self.damping * t).exp()
        }
    }

    /// Complex signal `Z(t) = A(t) e^{−iw0t}`.
    pub fn signal(&self, t: f64) -> Complex64 {
        self.envelope(t) * Complex64::new(0.0, -self.carrier_freq * t).exp()
    }

    /// Time after which the envelope energy has dropped below `rel` of its initial value.
    pub fn horizon(&self, rel: f64) -> f64 {
        -rel.ln() / self.damping
    }
}

/// `∫ f(t) e^{iwt} dt` over `window`.
pub fn fourier_pair<F>(f: F, w: f64, window: (f64, f64), tol: &Tolerances) -> Result<Complex64, DecayError>
where
    F: Fn(f64) -> Complex64,
{
    let r = integrate_adaptive(|t| f(t) * Complex64::new(0.0, w * t).exp(), window.0, window.1, tol)?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    /// `∫ |f|² dt`.
    pub time_side: f64,
    /// `(1/2π) ∫ |f̃|² dw`.
    pub frequency_side: f64,
}

/// Both sides of Parseval's identity for `f` supported in `time_window`, with the
/// frequency integral taken over `freq_window`.
///
/// With `tail_correction` the frequency side adds `|f̃(w)|² w` at each window edge,
/// the exact remainder for an inverse-square falloff.
pub fn parseval_check<F>(
    f: F,
    time_window: (f64, f64),
    freq_window: (f64, f64),
    tail_correction: bool,
    tol: &Tolerances,
) -> Result<ParsevalReport, DecayError>
where
    F: Fn(f64) -> Complex64,
{
    let time_side = integrate_adaptive(|t| Complex64::new(f(t).norm_sqr(), 0.0), time_window.0, time_window.1, tol)?
        .value
        .re;
    if time_side == 0.0 {
        return Ok(ParsevalReport { time_side, frequency_side: 0.0 });
    }
    let spectrum = |w: f64| fourier_pair(&f, w, time_window, tol).map(|v| v.norm_sqr());
    let outer_err = std::cell::Cell::new(None);
    let freq = integrate_adaptive(
        |w| match spectrum(w) {
            Ok(v) => Complex64::new(v, 0.0),
            Err(e) => {
                outer_err.set(Some(e));
                Complex64::default()
            }
        },
        freq_window.0,
        freq_window.1,
        tol,
    )?;
    if let Some(e) = outer_err.take() {
        return Err(e);
    }
    let mut total = freq.value.re;
    if tail_correction {
        total += spectrum(freq_window.1)? * freq_window.1.abs() + spectrum(freq_window.0)? * freq_window.0.abs();
    }
    Ok(ParsevalReport { time_side, frequency_side: total / (2.0 * PI) })
}

/// `I_w = (2φ0/γ)² (γ/2)² / ((w − w0)² + (γ/2)²)`, the constant fixed as written.
pub fn transient_spectral_density(s: &TransientSignal, w: f64) -> f64 {
    let peak = (2.0 * s.amplitude / s.damping).powi(2);
    let half = 0.5 * s.damping;
    peak * half * half / ((w - s.carrier_freq).powi(2) + half * half)
}

/// Closed-form `∫ I_w dw` over `|w − w0| ≤ half_window`.
pub fn transient_spectral_weight(s: &TransientSignal, half_window: f64) -> f64 {
    let half = 0.5 * s.damping;
    let peak = (2.0 * s.amplitude / s.damping).powi(2);
    2.0 * peak * half * (half_window / half).atan()
}
