//! Driven, damped classical oscillator `x'' + γx' + w0²x = Re(F e^{iwt}/m)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vacuum permittivity, F/m (CODATA 2018).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OscillatorError {
    #[error("invalid oscillator parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("undamped oscillator driven exactly at its natural frequency")]
    ResonanceSingularity,
    #[error("overdamped oscillator (damping {damping} >= 2 * natural frequency {natural_freq})")]
    Overdamped { damping: f64, natural_freq: f64 },
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub mass: f64,
    pub natural_freq: f64,
    /// Damping per unit mass, in frequency units.
    pub damping: f64,
    pub force_amplitude: f64,
    pub force_phase: f64,
}

impl OscillatorParams {
    pub fn new(
        mass: f64,
        natural_freq: f64,
        damping: f64,
        force_amplitude: f64,
        force_phase: f64,
    ) -> Result<Self, OscillatorError> {
        let p = Self { mass, natural_freq, damping, force_amplitude, force_phase };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OscillatorError> {
        let finite = [self.mass, self.natural_freq, self.damping, self.force_amplitude, self.force_phase]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(OscillatorError::InvalidParameter("non-finite value"));
        }
        if self.mass <= 0.0 {
            return Err(OscillatorError::InvalidParameter("mass must be positive"));
        }
        if self.natural_freq <= 0.0 {
            return Err(OscillatorError::InvalidParameter("natural frequency must be positive"));
        }
        if self.damping < 0.0 {
            return Err(OscillatorError::InvalidParameter("damping must be non-negative"));
        }
        if self.force_amplitude < 0.0 {
            return Err(OscillatorError::InvalidParameter("force amplitude must be non-negative"));
        }
        Ok(())
    }

    /// Complex response `Ω = 1 / (w0² − w² + iγw)`.
    pub fn response(&self, w: f64) -> Result<Complex64, OscillatorError> {
        self.validate()?;
        if !(w.is_finite() && w >= 0.0) {
            return Err(OscillatorError::InvalidParameter("driving frequency must be finite and non-negative"));
        }
        let denom = Complex64::new(self.natural_freq.powi(2) - w * w, self.damping * w);
        if denom.norm() == 0.0 {
            return Err(OscillatorError::ResonanceSingularity);
        }
        Ok(denom.inv())
    }

    /// Free oscillation frequency `ϑ = √(w0² − (γ/2)²)`.
    pub fn damped_freq(&self) -> Result<f64, OscillatorError> {
        self.validate()?;
        if self.damping >= 2.0 * self.natural_freq {
            return Err(OscillatorError::Overdamped { damping: self.damping, natural_freq: self.natural_freq });
        }
        Ok((self.natural_freq.powi(2) - 0.25 * self.damping * self.damping).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub amplitude: f64,
    /// Lag behind the force, in `(−π, 0]`.
    pub phase: f64,
    pub response_modulus: f64,
}

/// Steady-state amplitude and phase. For zero damping above `w0` the phase is the
/// limiting value `−π`.
pub fn steady_state(p: &OscillatorParams, w: f64) -> Result<SteadyState, OscillatorError> {
    let omega = p.response(w)?;
    let modulus = omega.norm();
    let phase = -f64::atan2(p.damping * w, p.natural_freq.powi(2) - w * w);
    Ok(SteadyState { amplitude: p.force_amplitude * modulus / p.mass, phase, response_modulus: modulus })
}

/// Stored energy `(w0 F0)² |Ω|² / 2m` of the steady state.
pub fn spectral_energy(p: &OscillatorParams, w: f64) -> Result<f64, OscillatorError> {
    let omega = p.response(w)?;
    Ok((p.natural_freq * p.force_amplitude).powi(2) / (2.0 * p.mass) * omega.norm_sqr())
}

/// Unit-height Lorentzian with full width `width` at half maximum.
pub fn fbw(w: f64, center: f64, width: f64) -> f64 {
    let half = 0.5 * width;
    half * half / ((center - w).powi(2) + half * half)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbwShape {
    pub center: f64,
    pub width: f64,
    pub height: f64,
}

impl FbwShape {
    pub fn new(center: f64, width: f64, height: f64) -> Result<Self, OscillatorError> {
        if !(width.is_finite() && width > 0.0) {
            return Err(OscillatorError::InvalidParameter("width must be positive"));
        }
        Ok(Self { center, width, height })
    }

    pub fn eval(&self, w: f64) -> f64 {
        self.height * fbw(w, self.center, self.width)
    }
}

/// Free decay `|z| e^{−γt/2} cos(ϑt + z0)` after the drive is switched off at `t = 0`.
pub fn transient(p: &OscillatorParams, z_abs: f64, z_phase: f64, t: f64) -> Result<f64, OscillatorError> {
    let theta = p.damped_freq()?;
    Ok(z_abs * (-0.5 * p.damping * t).exp() * (theta * t + z_phase).cos())
}

/// Energy envelope `½ m ϑ² |z|² e^{−γt}` of the free decay.
///
/// It equals `½ m [(x' + γx/2)² + ϑ²x²]` evaluated on the exact trajectory.
pub fn transient_energy(p: &OscillatorParams, z_abs: f64, t: f64) -> Result<f64, OscillatorError> {
    let theta = p.damped_freq()?;
    Ok(0.5 * p.mass * theta * theta * z_abs * z_abs * (-p.damping * t).exp())
}

/// Cycle-averaged power fed in by the drive, `m γ w² x0² / 2`.
pub fn average_power(p: &OscillatorParams, w: f64) -> Result<f64, OscillatorError> {
    let s = steady_state(p, w)?;
    Ok(0.5 * p.mass * p.damping * w * w * s.amplitude * s.amplitude)
}

/// Cycle-averaged stored energy `m x0² (w² + w0²) / 4`.
pub fn average_energy(p: &OscillatorParams, w: f64) -> Result<f64, OscillatorError> {
    let s = steady_state(p, w)?;
    Ok(0.25 * p.mass * s.amplitude * s.amplitude * (w * w + p.natural_freq.powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiativeDamping {
    /// Damping constant, 1/s.
    pub gamma: f64,
    /// `γ / w0²`, s.
    pub ratio: f64,
}

/// Radiation-reaction damping of a charge `q` (C) of mass `mass` (kg) bound at
/// angular frequency `w0` (rad/s): `γ = q² w0² / (6π ε0 m c³)`.
pub fn abraham_lorentz_gamma(w0: f64, q: f64, mass: f64) -> Result<RadiativeDamping, OscillatorError> {
    if !(w0.is_finite() && w0 > 0.0) {
        return Err(OscillatorError::NonPositiveFrequency(w0));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(OscillatorError::InvalidParameter("mass must be positive"));
    }
    let ratio = q * q / (6.0 * PI * VACUUM_PERMITTIVITY * mass * SPEED_OF_LIGHT.powi(3));
    Ok(RadiativeDamping { gamma: ratio * w0 * w0, ratio })
}

/// Natural frequency whose radiative damping equals `gamma`.
pub fn abraham_lorentz_frequency(gamma: f64, q: f64, mass: f64) -> Result<f64, OscillatorError> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(OscillatorError::NonPositiveFrequency(gamma));
    }
    let unit = abraham_lorentz_gamma(1.0, q, mass)?;
    Ok((gamma / unit.ratio).sqrt())
}
