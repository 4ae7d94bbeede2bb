//! First-order Darboux deformations seeded by a Gamow-Siegert state `u`:
//! `Ṽ = V + 2β'` with `β = −u'/u`, and the matching map `ψ ↦ ψ' + βψ` on solutions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamow::{build_gamow_state, GamowError, GamowState};
use crate::numerics::{integrate_adaptive, NumericsError, Tolerances};
use crate::scattering::{PiecewiseWave, Pole, PoleKind, ScatteringError, WavePoint};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DarbouxError {
    #[error("seed vanishes on the real line near x = {x} (relative size {relative:e})")]
    SeedHasRealZero { x: f64, relative: f64 },
    #[error("seed vanishes at evaluation point x = {0}")]
    SeedZero(f64),
    #[error("expected a resonance seed, got {0:?}")]
    NotAResonance(PoleKind),
    #[error("energy {0} is not a bound level of the base potential")]
    NotABoundLevel(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Gamow(#[from] GamowError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Relative size `|u| / (|u| + |u'|/|K|)` below which the seed counts as vanishing.
const ZERO_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub x: f64,
    pub re: f64,
    pub im: f64,
}

/// Local data of the seed: `β` and `β'`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SeedPoint {
    u: Complex64,
    beta: Complex64,
    beta_prime: Complex64,
    potential: f64,
}

fn local_wavenumber(energy: Complex64, potential: f64) -> f64 {
    (energy - potential).norm().sqrt().max(1.0)
}

fn relative_size(p: &WavePoint, local_k: f64) -> f64 {
    let denom = p.value.norm() + p.slope.norm() / local_k;
    if denom == 0.0 {
        0.0
    } else {
        p.value.norm() / denom
    }
}

fn seed_point(g: &GamowState, x: f64) -> Result<SeedPoint, DarbouxError> {
    let p = g.eval(x);
    let potential = g.potential_at(x);
    if relative_size(&p, local_wavenumber(g.energy(), potential)) < ZERO_THRESHOLD {
        return Err(DarbouxError::SeedZero(x));
    }
    let beta = -p.slope / p.value;
    let beta_prime = -p.curvature / p.value + beta * beta;
    Ok(SeedPoint { u: p.value, beta, beta_prime, potential })
}

/// Deformed potential `Ṽ = V + 2β'`, evaluated from the closed-form seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarbouxPotential {
    seed: GamowState,
    pub samples: Vec<PotentialSample>,
}

impl DarbouxPotential {
    pub fn seed(&self) -> &GamowState {
        &self.seed
    }

    pub fn value_at(&self, x: f64) -> Result<Complex64, DarbouxError> {
        let s = seed_point(&self.seed, x)?;
        Ok(s.potential + 2.0 * s.beta_prime)
    }

    /// `|Ṽ − (β' + β² + ε)|`, the mismatch between the two Riccati forms.
    pub fn riccati_pair_residual(&self, x: f64) -> Result<f64, DarbouxError> {
        let s = seed_point(&self.seed, x)?;
        let direct = s.potential + 2.0 * s.beta_prime;
        let flipped = s.beta_prime + s.beta * s.beta + self.seed.energy();
        Ok((direct - flipped).norm())
    }

    /// `max |Ṽ − V|` over `n` points on each of `±[a, b]`.
    pub fn reversion_residual(&self, a: f64, b: f64, n: usize) -> Result<f64, DarbouxError> {
        let mut worst = 0.0_f64;
        for i in 0..n.max(2) {
            let x = a + (b - a) * i as f64 / (n.max(2) - 1) as f64;
            for y in [x, -x] {
                let dv = self.value_at(y)? - self.seed.potential_at(y);
                worst = worst.max(dv.norm());
            }
        }
        Ok(worst)
    }

    /// Sign changes of `Im Ṽ` over `n` equally spaced points of `[a, b]`, ignoring values
    /// below `floor` in modulus.
    pub fn imaginary_sign_changes(&self, a: f64, b: f64, n: usize, floor: f64) -> Result<usize, DarbouxError> {
        let mut changes = 0;
        let mut last = 0.0_f64;
        for i in 0..n {
            let x = a + (b - a) * i as f64 / (n - 1) as f64;
            let im = self.value_at(x)?.im;
            if im.abs() <= floor {
                continue;
            }
            if last != 0.0 && im.signum() != last.signum() {
                changes += 1;
            }
            last = im;
        }
        Ok(changes)
    }
}

/// Approximate real zeros of the seed: local minima of its relative size, polished by
/// golden-section search within each constant segment.
pub fn seed_real_zeros(g: &GamowState, threshold: f64) -> Vec<(f64, f64)> {
    let segments = &g.wave().segments;
    let mut zeros = Vec::new();
    for seg in &segments[1..segments.len() - 1] {
        let local_k = local_wavenumber(g.energy(), seg.potential);
        let size = |x: f64| relative_size(&seg.eval(g.energy(), x), local_k);
        let len = seg.right - seg.left;
        let cells = ((len * local_k * 8.0).ceil() as usize).clamp(64, 200_000);
        let xs: Vec<f64> = (0..=cells).map(|i| seg.left + len * i as f64 / cells as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| size(x)).collect();
        for i in 0..=cells {
            let left_ok = i == 0 || ys[i] <= ys[i - 1];
            let right_ok = i == cells || ys[i] <= ys[i + 1];
            if !(left_ok && right_ok) {
                continue;
            }
            let (mut lo, mut hi) = (xs[i.saturating_sub(1)], xs[(i + 1).min(cells)]);
            for _ in 0..80 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if size(m1) < size(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let x = 0.5 * (lo + hi);
            let relative = size(x);
            if relative < threshold && !zeros.iter().any(|(z, _): &(f64, f64)| (z - x).abs() < 1e-9) {
                zeros.push((x, relative));
            }
        }
    }
    zeros
}

/// Deformation `Ṽ = V + 2β'` seeded by `g`, sampled at `points` positions on `[x_min, x_max]`.
pub fn darboux_potential(
    g: &GamowState,
    x_min: f64,
    x_max: f64,
    points: usize,
) -> Result<DarbouxPotential, DarbouxError> {
    if !(x_min < x_max) || points < 2 {
        return Err(DarbouxError::InvalidParameter(format!("sampling [{x_min}, {x_max}] with {points} points")));
    }
    if let Some(&(x, relative)) = seed_real_zeros(g, ZERO_THRESHOLD).first() {
        return Err(DarbouxError::SeedHasRealZero { x, relative });
    }
    let mut d = DarbouxPotential { seed: g.clone(), samples: Vec::with_capacity(points) };
    for i in 0..points {
        let x = x_min + (x_max - x_min) * i as f64 / (points - 1) as f64;
        let v = d.value_at(x)?;
        d.samples.push(PotentialSample { x, re: v.re, im: v.im });
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Transform {
    /// `y = W(u, ψ)/u = ψ' + βψ`.
    Wronskian(PiecewiseWave),
    /// `y = 1/u`.
    Reciprocal,
}

/// Solution of the deformed equation `−y'' + Ṽ y = ℰ y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedState {
    pub energy: Complex64,
    seed: GamowState,
    transform: Transform,
}

impl TransformedState {
    pub fn eval(&self, x: f64) -> Result<WavePoint, DarbouxError> {
        let s = seed_point(&self.seed, x)?;
        Ok(match &self.transform {
            Transform::Wronskian(psi) => {
                let p = psi.eval(x);
                let shift = s.potential - self.energy;
                let second = shift * p.value;
                let third = shift * p.slope;
                let beta_second = 2.0 * s.beta * s.beta_prime;
                WavePoint {
                    value: p.slope + s.beta * p.value,
                    slope: second + s.beta_prime * p.value + s.beta * p.slope,
                    curvature: third + beta_second * p.value + 2.0 * s.beta_prime * p.slope + s.beta * second,
                }
            }
            Transform::Reciprocal => {
                let y = 1.0 / s.u;
                WavePoint { value: y, slope: s.beta * y, curvature: (s.beta_prime + s.beta * s.beta) * y }
            }
        })
    }

    /// `|−y'' + (Ṽ − ℰ) y|`, relative to the larger of the two terms.
    pub fn residual(&self, x: f64) -> Result<f64, DarbouxError> {
        let s = seed_point(&self.seed, x)?;
        let p = self.eval(x)?;
        let deformed = s.potential + 2.0 * s.beta_prime;
        let kinetic = -p.curvature;
        let rest = (deformed - self.energy) * p.value;
        let scale = kinetic.norm().max(rest.norm());
        Ok(if scale == 0.0 { 0.0 } else { (kinetic + rest).norm() / scale })
    }

    /// Worst [`TransformedState::residual`] over `n` points of `[a, b]`.
    pub fn max_residual(&self, a: f64, b: f64, n: usize) -> Result<f64, DarbouxError> {
        let n = n.max(2);
        (0..n)
            .map(|i| self.residual(a + (b - a) * i as f64 / (n - 1) as f64))
            .try_fold(0.0_f64, |m, r| r.map(|r| m.max(r)))
    }

    /// Coefficients `(c, d)` of `c e^{iqx} + d e^{−iqx}` matching `y` at `x`, where
    /// `q² = ℰ`.
    pub fn plane_wave_coefficients(&self, x: f64) -> Result<(Complex64, Complex64), DarbouxError> {
        let q = self.energy.sqrt();
        let p = self.eval(x)?;
        let iq = Complex64::i() * q;
        let c = 0.5 * (p.value + p.slope / iq) * (-iq * x).exp();
        let d = 0.5 * (p.value - p.slope / iq) * (iq * x).exp();
        Ok((c, d))
    }

    /// Weight of `|y|²` beyond `|x| > radius` over the total, for states whose exterior
    /// form is a single decaying exponential.
    pub fn tail_fraction(&self, radius: f64, tol: &Tolerances) -> Result<f64, DarbouxError> {
        let decay = self.exterior_decay()?;
        let inner = integrate_adaptive(
            |x| match self.eval(x) {
                Ok(p) => Complex64::from(p.value.norm_sqr()),
                Err(_) => Complex64::new(f64::NAN, 0.0),
            },
            -radius,
            radius,
            tol,
        )?
        .value
        .re;
        if !inner.is_finite() {
            return Err(DarbouxError::SeedZero(f64::NAN));
        }
        let tails = (self.eval(radius)?.value.norm_sqr() + self.eval(-radius)?.value.norm_sqr()) / decay;
        Ok(tails / (inner + tails))
    }

    /// Decay rate of `|y|²` in the exterior.
    fn exterior_decay(&self) -> Result<f64, DarbouxError> {
        let rate = match &self.transform {
            Transform::Wronskian(psi) => 2.0 * psi.k.im,
            Transform::Reciprocal => -2.0 * self.seed.k().im,
        };
        if !(rate > 0.0) {
            return Err(DarbouxError::InvalidParameter("state is not exponentially decaying".into()));
        }
        Ok(rate)
    }
}

/// `y = ψ' + βψ` for a solution `ψ` of the base equation.
pub fn transform_state(g: &GamowState, psi: &PiecewiseWave) -> TransformedState {
    TransformedState { energy: psi.energy(), seed: g.clone(), transform: Transform::Wronskian(psi.clone()) }
}

/// The extra eigenfunction `1/u` at the seed energy.
pub fn missing_state(g: &GamowState) -> Result<TransformedState, DarbouxError> {
    if g.pole.kind != PoleKind::Resonance {
        return Err(DarbouxError::NotAResonance(g.pole.kind));
    }
    if let Some(&(x, _)) = seed_real_zeros(g, ZERO_THRESHOLD).first() {
        return Err(DarbouxError::SeedZero(x));
    }
    Ok(TransformedState { energy: g.energy(), seed: g.clone(), transform: Transform::Reciprocal })
}

/// Transmission amplitude of the transformed left-incidence scattering state at wavenumber
/// `q > 0`, read from plane-wave coefficients at `±probe`.
pub fn transformed_transmission(g: &GamowState, q: f64, probe: f64) -> Result<Complex64, DarbouxError> {
    let psi = PiecewiseWave::scattering_state(g.potential(), Complex64::new(q, 0.0))?;
    let y = transform_state(g, &psi);
    let (incident, _) = y.plane_wave_coefficients(-probe)?;
    let (transmitted, _) = y.plane_wave_coefficients(probe)?;
    Ok(transmitted / incident)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumOrigin {
    BaseBound,
    Seed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub energy: Complex64,
    pub origin: SpectrumOrigin,
    /// Worst relative eigen-residual over the sample points.
    pub residual: f64,
    /// Share of `∫|y|²` beyond the tail radius.
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    /// Transformed eigenfunctions are generally not mutually orthogonal.
    pub orthogonal: bool,
}

/// Point spectrum of the deformed Hamiltonian: each base bound level with its transformed
/// eigenfunction, plus the seed energy carried by `1/u`. Residuals use `samples` points
/// spanning the interaction region with a margin of 5 on both sides.
pub fn spectrum_report(
    base_bounds: &[f64],
    seed: &GamowState,
    samples: usize,
    tol: &Tolerances,
) -> Result<SpectrumReport, DarbouxError> {
    let v = seed.potential();
    let reach = v.cutoff() + 5.0;
    let mut entries = Vec::with_capacity(base_bounds.len() + 1);
    for &energy in base_bounds {
        if !(energy < 0.0) {
            return Err(DarbouxError::NotABoundLevel(energy));
        }
        let kappa = (-energy).sqrt();
        let pole = Pole::classify(Complex64::new(0.0, kappa), 0.0).ok_or(DarbouxError::NotABoundLevel(energy))?;
        let bound = build_gamow_state(v, &pole, 1e-8).map_err(|_| DarbouxError::NotABoundLevel(energy))?;
        let y = transform_state(seed, bound.wave());
        let radius = v.cutoff() + 40.0 / kappa;
        entries.push(SpectrumEntry {
            energy: Complex64::new(energy, 0.0),
            origin: SpectrumOrigin::BaseBound,
            residual: y.max_residual(-reach, reach, samples)?,
            tail_fraction: y.tail_fraction(radius, tol)?,
        });
    }
    let y = missing_state(seed)?;
    let radius = v.cutoff() + 40.0 / seed.k().im.abs();
    entries.push(SpectrumEntry {
        energy: seed.energy(),
        origin: SpectrumOrigin::Seed,
        residual: y.max_residual(-reach, reach, samples)?,
        tail_fraction: y.tail_fraction(radius, tol)?,
    });
    Ok(SpectrumReport { entries, orthogonal: false })
}
