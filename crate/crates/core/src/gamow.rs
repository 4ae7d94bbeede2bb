//! Gamow-Siegert states: purely outgoing solutions at complex pole energies, stored in
//! closed piecewise form, plus the flux and optical-potential bookkeeping around them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{integrate_adaptive, NumericsError, Tolerances};
use crate::scattering::{
    local_jost, PiecewisePotential, PiecewiseWave, Pole, PoleKind, ScatteringError, SegmentAmplitudes,
    SegmentForm, WavePoint,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GamowError {
    #[error("k = {k} is not a pole: |jost| = {residual:e}")]
    NotAPole { k: Complex64, residual: f64 },
    #[error("wavefunction vanishes at x = {x} (|u| = {modulus:e})")]
    NodeAtX { x: f64, modulus: f64 },
    #[error("state does not decay: width {0}")]
    NonDecaying(f64),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("{0:?} states are not square integrable")]
    NonNormalizable(PoleKind),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("continuity residual {coarse:e} shrinks to {fine:e} on halving the step")]
    GridTooCoarse { coarse: f64, fine: f64 },
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Purely outgoing solution at a pole of the transmission amplitude.
///
/// Normalized to `e^{ik(x − x_n)}` right of the interaction region; on the left it is
/// `d · e^{−ik(x − x_0)}` with the incoming part set exactly to zero. The discarded
/// incoming amplitude equals the Jost function at `k` and is kept as `mismatch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamowState {
    pub pole: Pole,
    potential: PiecewisePotential,
    wave: PiecewiseWave,
    mismatch: f64,
}

impl GamowState {
    pub fn pole(&self) -> &Pole {
        &self.pole
    }

    pub fn k(&self) -> Complex64 {
        self.wave.k
    }

    pub fn energy(&self) -> Complex64 {
        self.wave.energy()
    }

    pub fn potential(&self) -> &PiecewisePotential {
        &self.potential
    }

    /// Potential of the segment that owns `x`, consistent with [`GamowState::eval`].
    pub fn potential_at(&self, x: f64) -> f64 {
        self.wave.segments[self.wave.segment_index(x)].potential
    }

    pub fn wave(&self) -> &PiecewiseWave {
        &self.wave
    }

    /// Size of the incoming amplitude that was dropped on the left.
    pub fn mismatch(&self) -> f64 {
        self.mismatch
    }

    pub fn eval(&self, x: f64) -> WavePoint {
        self.wave.eval(x)
    }

    pub fn amplitudes(&self) -> Vec<SegmentAmplitudes> {
        self.wave.amplitudes()
    }

    /// `v = 2 Re k`, the flux velocity for ħ = 2m = 1.
    pub fn flux_velocity(&self) -> f64 {
        2.0 * self.k().re
    }

    pub fn left_edge(&self) -> f64 {
        self.wave.segments[0].right
    }

    pub fn right_edge(&self) -> f64 {
        self.wave.segments[self.wave.segments.len() - 1].left
    }

    /// `β = −u'/u`.
    pub fn beta(&self, x: f64) -> Result<Complex64, GamowError> {
        let p = self.eval(x);
        self.check_node(x, &p)?;
        Ok(-p.slope / p.value)
    }

    /// `β' = −u''/u + β²`, analytic within each segment.
    pub fn beta_derivative(&self, x: f64) -> Result<Complex64, GamowError> {
        let p = self.eval(x);
        self.check_node(x, &p)?;
        let beta = -p.slope / p.value;
        Ok(-p.curvature / p.value + beta * beta)
    }

    /// `|−β' + β² + ε − V|` with `β'` from a central difference of step `h`.
    pub fn riccati_residual(&self, v: &PiecewisePotential, x: f64, h: f64) -> Result<f64, GamowError> {
        let beta = self.beta(x)?;
        let d = (self.beta(x + h)? - self.beta(x - h)?) / (2.0 * h);
        Ok((-d + beta * beta + self.energy() - v.value_at(x)).norm())
    }

    /// `|−β ∓ ik|` at `x`, with the upper sign right of the origin: zero for an exactly
    /// outgoing tail.
    pub fn outgoing_residual(&self, x: f64) -> Result<f64, GamowError> {
        let ik = Complex64::i() * self.k();
        let beta = self.beta(x)?;
        Ok(if x >= 0.0 { (-beta - ik).norm() } else { (-beta + ik).norm() })
    }

    /// `∫ |u|²` over the real line. Only bound states qualify.
    pub fn norm_squared(&self, tol: &Tolerances) -> Result<f64, GamowError> {
        let kappa = self.bound_kappa()?;
        let (_, left_amp) = self.wave.left_exterior();
        let mut total = left_amp.norm_sqr() / (2.0 * kappa) + 1.0 / (2.0 * kappa);
        for seg in &self.wave.segments[1..self.wave.segments.len() - 1] {
            let density = |x: f64| Complex64::from(seg.eval(self.energy(), x).value.norm_sqr());
            total += integrate_adaptive(density, seg.left, seg.right, tol)?.value.re;
        }
        Ok(total)
    }

    /// `∫ |u|²` over `|x| > radius`, closed form; `radius` must lie outside the
    /// interaction region.
    pub fn tail_weight(&self, radius: f64) -> Result<f64, GamowError> {
        let kappa = self.bound_kappa()?;
        if radius < self.right_edge() || -radius > self.left_edge() {
            return Err(GamowError::InvalidParameter(format!("radius {radius} inside the interaction region")));
        }
        let (_, left_amp) = self.wave.left_exterior();
        let right = (-2.0 * kappa * (radius - self.right_edge())).exp() / (2.0 * kappa);
        let left = left_amp.norm_sqr() * (2.0 * kappa * (-radius - self.left_edge())).exp() / (2.0 * kappa);
        Ok(left + right)
    }

    fn bound_kappa(&self) -> Result<f64, GamowError> {
        if self.pole.kind != PoleKind::Bound {
            return Err(GamowError::NonNormalizable(self.pole.kind));
        }
        Ok(self.k().im)
    }

    fn check_node(&self, x: f64, p: &WavePoint) -> Result<(), GamowError> {
        let seg = &self.wave.segments[self.wave.segment_index(x)];
        let local_k = (self.energy() - seg.potential).norm().sqrt().max(1.0);
        if p.value.norm() < 1e-13 * (p.value.norm() + p.slope.norm() / local_k) {
            return Err(GamowError::NodeAtX { x, modulus: p.value.norm() });
        }
        Ok(())
    }
}

/// Builds the outgoing state at `pole`, rejecting points where `|jost(k)| > tol`.
pub fn build_gamow_state(v: &PiecewisePotential, pole: &Pole, tol: f64) -> Result<GamowState, GamowError> {
    let k = pole.k;
    let residual = local_jost(v, k).norm();
    if !(residual <= tol) {
        return Err(GamowError::NotAPole { k, residual });
    }
    let mut wave = PiecewiseWave::from_right(v, k, Complex64::new(1.0, 0.0), Complex64::default());
    let mismatch = match &mut wave.segments[0].form {
        SegmentForm::Waves { plus, .. } => std::mem::take(plus).norm(),
        SegmentForm::Propagated { .. } => unreachable!("exterior segments use plane waves"),
    };
    Ok(GamowState { pole: *pole, potential: v.clone(), wave, mismatch })
}

/// `j = 2 Im(ū u')`, the probability current for ħ = 2m = 1.
pub fn probability_current(p: &WavePoint) -> f64 {
    2.0 * (p.value.conj() * p.slope).im
}

/// `ρ(x, t) = e^{−Γt} |u(x)|²`.
pub fn density_evolution(g: &GamowState, x: f64, t: f64) -> Result<f64, GamowError> {
    let width = g.pole.width();
    if !(width > 0.0) {
        return Err(GamowError::NonDecaying(width));
    }
    if t < 0.0 {
        return Err(GamowError::NegativeTime(t));
    }
    Ok((-width * t).exp() * g.eval(x).value.norm_sqr())
}

/// Far-field density right of the interaction region, `e^{−Γ(t − (x − x_n)/v)}`.
pub fn asymptotic_density(g: &GamowState, x: f64, t: f64) -> Result<f64, GamowError> {
    let width = g.pole.width();
    if !(width > 0.0) {
        return Err(GamowError::NonDecaying(width));
    }
    if t < 0.0 {
        return Err(GamowError::NegativeTime(t));
    }
    Ok((-width * (t - (x - g.right_edge()) / g.flux_velocity())).exp())
}

/// Real potential with a constant absorbing part `sink ≤ 0` on `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalPotential {
    pub base: PiecewisePotential,
    sink: f64,
    support: (f64, f64),
}

impl OpticalPotential {
    pub fn new(base: PiecewisePotential, sink: f64, support: (f64, f64)) -> Result<Self, GamowError> {
        if !(sink <= 0.0) || !sink.is_finite() {
            return Err(GamowError::InvalidParameter(format!("sink must be real and non-positive, got {sink}")));
        }
        let zeta = base.cutoff();
        if !(support.0 < support.1) || support.0 < -zeta || support.1 > zeta {
            return Err(GamowError::InvalidParameter(format!("support {support:?} must lie in [-{zeta}, {zeta}]")));
        }
        Ok(Self { base, sink, support })
    }

    /// Sink of strength `−Γ/2`.
    pub fn from_width(base: PiecewisePotential, width: f64, support: (f64, f64)) -> Result<Self, GamowError> {
        Self::new(base, -0.5 * width, support)
    }

    pub fn sink(&self) -> f64 {
        self.sink
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn imag_at(&self, x: f64) -> f64 {
        if x >= self.support.0 && x <= self.support.1 {
            self.sink
        } else {
            0.0
        }
    }

    pub fn value_at(&self, x: f64) -> Complex64 {
        Complex64::new(self.base.value_at(x), self.imag_at(x))
    }
}

/// Uniform space grid and time step used by [`optical_continuity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub dt: f64,
}

impl ContinuityGrid {
    fn validate(&self) -> Result<(), GamowError> {
        let ok = self.x_min < self.x_max && self.points >= 3 && self.dt > 0.0 && self.dt.is_finite();
        if !ok {
            return Err(GamowError::InvalidParameter(format!("{self:?}")));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self { points: 2 * self.points - 1, dt: 0.5 * self.dt, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// Max over the grid of `|∂ρ/∂t + ∂j/∂x − 2 U_I ρ|`.
    pub residual: f64,
    /// `dN/dt = 2 ∫ U_I ρ dx` over the grid.
    pub particle_rate: f64,
    /// `N = ∫ ρ dx` over the grid.
    pub particles: f64,
}

fn continuity_pass<F>(op: &OpticalPotential, psi: &F, grid: &ContinuityGrid, t: f64) -> ContinuityReport
where
    F: Fn(f64, f64) -> Complex64,
{
    let h = (grid.x_max - grid.x_min) / (grid.points - 1) as f64;
    let xs: Vec<f64> = (0..grid.points).map(|i| grid.x_min + h * i as f64).collect();
    let now: Vec<Complex64> = xs.iter().map(|&x| psi(x, t)).collect();
    let rho: Vec<f64> = now.iter().map(|z| z.norm_sqr()).collect();
    let mut residual = 0.0_f64;
    for i in 1..grid.points - 1 {
        let x = xs[i];
        let d_rho_dt = (psi(x, t + grid.dt).norm_sqr() - psi(x, t - grid.dt).norm_sqr()) / (2.0 * grid.dt);
        let second = (now[i + 1] - 2.0 * now[i] + now[i - 1]) / (h * h);
        let dj_dx = 2.0 * (now[i].conj() * second).im;
        let r = (d_rho_dt + dj_dx - 2.0 * op.imag_at(x) * rho[i]).abs();
        residual = residual.max(r);
    }
    let trapezoid = |f: &dyn Fn(usize) -> f64| {
        let inner: f64 = (1..grid.points - 1).map(f).sum();
        h * (inner + 0.5 * (f(0) + f(grid.points - 1)))
    };
    let particles = trapezoid(&|i| rho[i]);
    let particle_rate = trapezoid(&|i| 2.0 * op.imag_at(xs[i]) * rho[i]);
    ContinuityReport { residual, particle_rate, particles }
}

/// Continuity equation with a source term, checked on `psi(x, t)` by finite
/// differences. When the residual exceeds `tol` and halves along with the step, the
/// grid is too coarse to say anything and `GridTooCoarse` is returned.
pub fn optical_continuity_check<F>(
    op: &OpticalPotential,
    psi: F,
    grid: &ContinuityGrid,
    t: f64,
    tol: f64,
) -> Result<ContinuityReport, GamowError>
where
    F: Fn(f64, f64) -> Complex64,
{
    grid.validate()?;
    if t < 0.0 {
        return Err(GamowError::NegativeTime(t));
    }
    let coarse = continuity_pass(op, &psi, grid, t);
    if coarse.residual > tol {
        let fine = continuity_pass(op, &psi, &grid.halved(), t);
        if fine.residual < 0.5 * coarse.residual {
            return Err(GamowError::GridTooCoarse { coarse: coarse.residual, fine: fine.residual });
        }
    }
    Ok(coarse)
}

/// Separable solution `u(x) e^{−iE₀t} e^{−Γt/2}` of the equation with a uniform sink
/// `−Γ/2`, where `u` solves the real problem at energy `E₀`.
pub fn stationary_ansatz(u: &PiecewiseWave, width: f64) -> impl Fn(f64, f64) -> Complex64 + '_ {
    let energy = u.energy().re;
    move |x, t| u.eval(x).value * Complex64::new(-0.5 * width * t, -energy * t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{find_poles, KRegion, PoleSearch};
    use approx::assert_relative_eq;

    fn well() -> PiecewisePotential {
        PiecewisePotential::square_well(30.0, 2.0).unwrap()
    }

    fn poles(v: &PiecewisePotential) -> Vec<Pole> {
        let region = KRegion::new((-0.5, 9.0), (-3.0, 6.0)).unwrap();
        find_poles(v, &region, &PoleSearch::default()).unwrap().poles
    }

    #[test]
    fn outgoing_tails_are_exact() {
        let v = well();
        for p in poles(&v) {
            let g = build_gamow_state(&v, &p, 1e-8).unwrap();
            let far = v.cutoff() + 10.0;
            assert!(g.outgoing_residual(far).unwrap() < 1e-10, "{p:?}");
            assert!(g.outgoing_residual(-far).unwrap() < 1e-10, "{p:?}");
            assert!(g.mismatch() < 1e-8);
        }
    }

    #[test]
    fn rejects_regular_points() {
        let v = well();
        let fake = Pole::classify(Complex64::new(2.0, -0.5), 0.0).unwrap();
        assert!(matches!(build_gamow_state(&v, &fake, 1e-8), Err(GamowError::NotAPole { .. })));
    }

    #[test]
    fn riccati_holds_inside() {
        let v = well();
        for p in poles(&v).iter().filter(|p| p.kind == PoleKind::Resonance).take(3) {
            let g = build_gamow_state(&v, p, 1e-8).unwrap();
            for i in 0..100 {
                let x = -0.99 + 1.98 * i as f64 / 99.0;
                let Ok(beta) = g.beta(x) else { continue };
                let d = g.beta_derivative(x).unwrap();
                let analytic = (-d + beta * beta + g.energy() - v.value_at(x)).norm();
                assert!(analytic < 1e-9 * beta.norm_sqr().max(1.0), "x={x}: {analytic}");
                let fd = g.riccati_residual(&v, x, 1e-5).unwrap();
                assert!(fd < 1e-5 * beta.norm_sqr().max(1.0), "x={x}: {fd}");
            }
        }
    }

    #[test]
    fn resonance_grows_outside() {
        let v = well();
        let p = poles(&v).into_iter().find(|p| p.kind == PoleKind::Resonance).unwrap();
        let g = build_gamow_state(&v, &p, 1e-8).unwrap();
        let (a, b) = (v.cutoff() + 5.0, v.cutoff() + 15.0);
        let ratio = g.eval(b).value.norm() / g.eval(a).value.norm();
        assert_relative_eq!(ratio, (-p.k.im * (b - a)).exp(), max_relative = 1e-12);
        let ratio = g.eval(-b).value.norm() / g.eval(-a).value.norm();
        assert_relative_eq!(ratio, (-p.k.im * (b - a)).exp(), max_relative = 1e-9);
    }

    #[test]
    fn current_sign_pattern() {
        let v = well();
        for p in poles(&v).iter().filter(|p| p.kind == PoleKind::Resonance) {
            let g = build_gamow_state(&v, p, 1e-8).unwrap();
            assert!(p.k.re > 0.0 && p.k.im < 0.0);
            let x = v.cutoff() + 1.0;
            let right = g.eval(x);
            let left = g.eval(-x);
            let j_right = probability_current(&right);
            let j_left = probability_current(&left);
            assert!(j_right > 0.0 && j_left < 0.0);
            assert_relative_eq!(j_right, g.flux_velocity() * right.value.norm_sqr(), max_relative = 1e-12);
            assert_relative_eq!(j_left, -g.flux_velocity() * left.value.norm_sqr(), max_relative = 1e-9);
        }
    }

    #[test]
    fn plane_wave_and_bound_currents() {
        let k = 1.7;
        let x: f64 = 0.3;
        let value = Complex64::new(0.0, k * x).exp();
        let p = WavePoint { value, slope: Complex64::i() * k * value, curvature: -k * k * value };
        assert_relative_eq!(probability_current(&p), 2.0 * k, max_relative = 1e-15);
        let v = well();
        let bound = poles(&v).into_iter().find(|p| p.kind == PoleKind::Bound).unwrap();
        let g = build_gamow_state(&v, &bound, 1e-8).unwrap();
        for x in [-3.0, -0.4, 0.0, 0.8, 2.5] {
            assert!(probability_current(&g.eval(x)).abs() < 1e-12 * g.eval(x).value.norm_sqr().max(1e-300));
        }
    }

    #[test]
    fn bound_tail_is_negligible() {
        let v = well();
        for p in poles(&v).iter().filter(|p| p.kind == PoleKind::Bound) {
            let g = build_gamow_state(&v, p, 1e-8).unwrap();
            let total = g.norm_squared(&Tolerances::default()).unwrap();
            let tail = g.tail_weight(v.cutoff() + 40.0 / p.k.im).unwrap();
            assert!(tail < 1e-12 * total);
        }
        let res = poles(&v).into_iter().find(|p| p.kind == PoleKind::Resonance).unwrap();
        let g = build_gamow_state(&v, &res, 1e-8).unwrap();
        assert!(matches!(g.norm_squared(&Tolerances::default()), Err(GamowError::NonNormalizable(_))));
    }

    #[test]
    fn density_decays_and_travels() {
        let v = well();
        let p = poles(&v).into_iter().find(|p| p.kind == PoleKind::Resonance).unwrap();
        let g = build_gamow_state(&v, &p, 1e-8).unwrap();
        let width = p.width();
        let x = 0.4;
        let ratio = density_evolution(&g, x, 1.0 / width).unwrap() / density_evolution(&g, x, 0.0).unwrap();
        assert_relative_eq!(ratio, (-1.0_f64).exp(), max_relative = 1e-14);
        let (x0, t0, shift) = (v.cutoff() + 30.0, 2.0, 3.0);
        let a = asymptotic_density(&g, x0, t0).unwrap();
        let b = asymptotic_density(&g, x0 + g.flux_velocity() * shift, t0 + shift).unwrap();
        assert!((a - b).abs() < 1e-6 * a);
        let exact = density_evolution(&g, x0, t0).unwrap();
        assert_relative_eq!(exact, a, max_relative = 1e-9);
        assert!(matches!(density_evolution(&g, x, -1.0), Err(GamowError::NegativeTime(_))));
        let bound = poles(&v).into_iter().find(|p| p.kind == PoleKind::Bound).unwrap();
        let gb = build_gamow_state(&v, &bound, 1e-8).unwrap();
        assert!(matches!(density_evolution(&gb, x, 1.0), Err(GamowError::NonDecaying(_))));
    }

    #[test]
    fn scattering_density_interference() {
        let v = well();
        let k = 2.3;
        let w = PiecewiseWave::scattering_state(&v, Complex64::new(k, 0.0)).unwrap();
        let s = crate::scattering::solve_scattering(&v, Complex64::new(k, 0.0)).unwrap();
        let l = s.reflected;
        for x in [-9.0, -5.5, -2.0] {
            let expected = 1.0 + l.norm_sqr() + 2.0 * l.norm() * (2.0 * k * x - l.arg()).cos();
            assert_relative_eq!(w.eval(x).value.norm_sqr(), expected, max_relative = 1e-10);
        }
    }

    fn interior_state(v: &PiecewisePotential, energy: f64) -> PiecewiseWave {
        PiecewiseWave::scattering_state(v, Complex64::new(energy.sqrt(), 0.0)).unwrap()
    }

    #[test]
    fn hermitian_stationary_state_conserves_flux() {
        let v = PiecewisePotential::square_barrier(2.0, 4.0).unwrap();
        let op = OpticalPotential::new(v.clone(), 0.0, (-2.0, 2.0)).unwrap();
        let u = interior_state(&v, 3.1);
        let grid = ContinuityGrid { x_min: -1.9, x_max: 1.9, points: 401, dt: 1e-4 };
        let report = optical_continuity_check(&op, stationary_ansatz(&u, 0.0), &grid, 0.7, 1e-8).unwrap();
        assert!(report.residual < 1e-8, "{report:?}");
        assert_eq!(report.particle_rate, 0.0);
    }

    #[test]
    fn sink_removes_particles_at_rate_gamma() {
        let v = PiecewisePotential::square_barrier(2.0, 4.0).unwrap();
        let width = 0.6;
        let op = OpticalPotential::from_width(v.clone(), width, (-2.0, 2.0)).unwrap();
        let u = interior_state(&v, 3.1);
        let psi = stationary_ansatz(&u, width);
        let grid = ContinuityGrid { x_min: -1.9, x_max: 1.9, points: 801, dt: 1e-4 };
        let start = optical_continuity_check(&op, &psi, &grid, 0.0, 1e-6).unwrap();
        let t = 2.5;
        let later = optical_continuity_check(&op, &psi, &grid, t, 1e-6).unwrap();
        assert!(later.particle_rate < 0.0);
        assert!((later.particles / start.particles - (-width * t).exp()).abs() < 1e-8);
        assert_relative_eq!(later.particle_rate, -width * later.particles, max_relative = 1e-12);
        let rho0 = psi(0.3, 0.0).norm_sqr();
        let rho = psi(0.3, t).norm_sqr();
        assert_relative_eq!(rho / rho0, (-width * t).exp(), max_relative = 1e-12);
    }

    #[test]
    fn coarse_time_step_is_detected() {
        let v = PiecewisePotential::square_barrier(2.0, 4.0).unwrap();
        let width = 0.6;
        let op = OpticalPotential::from_width(v.clone(), width, (-2.0, 2.0)).unwrap();
        let u = interior_state(&v, 3.1);
        let grid = ContinuityGrid { x_min: -1.9, x_max: 1.9, points: 101, dt: 0.5 };
        assert!(matches!(
            optical_continuity_check(&op, stationary_ansatz(&u, width), &grid, 1.0, 1e-8),
            Err(GamowError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn optical_support_is_validated() {
        let v = PiecewisePotential::square_barrier(2.0, 4.0).unwrap();
        assert!(OpticalPotential::new(v.clone(), 0.5, (-1.0, 1.0)).is_err());
        assert!(OpticalPotential::new(v, -0.5, (-3.0, 1.0)).is_err());
    }
}
