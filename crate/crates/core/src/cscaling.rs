//! Complex scaling on a finite-difference grid: the rotated Hamiltonian
//! `e^{−2iθ}P² + V(x e^{iθ})`, or its exterior-scaled variant for potentials with jumps,
//! and the θ-trajectory analysis of its complex spectrum.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{eigenvalues_dense, NumericsError, Tridiagonal};
use crate::scattering::PiecewisePotential;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CScalingError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("piecewise potentials need exterior scaling")]
    ModeMismatch,
    #[error("no eigenvalue enters the target region")]
    NoCandidate,
    #[error("trajectory drift {drift:e} exceeds {limit:e}")]
    Unstable { drift: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    /// `x ↦ x e^{iθ}` everywhere.
    Uniform,
    /// `x ↦ ±R + (x ∓ R) e^{iθ}` for `|x| > R`, identity inside.
    Exterior { radius: f64 },
}

/// Uniform real grid with `n` interior nodes and Dirichlet ends at `x_min`, `x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub theta: f64,
    pub mode: ScalingMode,
}

impl ScaledGrid {
    pub fn new(x_min: f64, x_max: f64, n: usize, theta: f64, mode: ScalingMode) -> Result<Self, CScalingError> {
        let grid = Self { x_min, x_max, n, theta, mode };
        grid.validate()?;
        Ok(grid)
    }

    /// Exterior-scaled grid over `[−ζ − margin, ζ + margin]` with scaling radius ζ.
    pub fn for_potential(v: &PiecewisePotential, margin: f64, n: usize, theta: f64) -> Result<Self, CScalingError> {
        let zeta = v.cutoff();
        Self::new(-zeta - margin, zeta + margin, n, theta, ScalingMode::Exterior { radius: zeta })
    }

    /// Default resolution: 1200 nodes and a margin of 15.
    pub fn default_for(v: &PiecewisePotential, theta: f64) -> Result<Self, CScalingError> {
        Self::for_potential(v, 15.0, 1200, theta)
    }

    pub fn validate(&self) -> Result<(), CScalingError> {
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(CScalingError::InvalidGrid(format!("range [{}, {}]", self.x_min, self.x_max)));
        }
        if self.n < 50 {
            return Err(CScalingError::InvalidGrid(format!("need at least 50 nodes, got {}", self.n)));
        }
        if !(self.theta >= 0.0 && self.theta < FRAC_PI_2) {
            return Err(CScalingError::InvalidGrid(format!("theta {} outside [0, π/2)", self.theta)));
        }
        if let ScalingMode::Exterior { radius } = self.mode {
            if !(radius >= 0.0) || -radius <= self.x_min || radius >= self.x_max {
                return Err(CScalingError::InvalidGrid(format!("radius {radius} must lie inside the grid")));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    /// Position of node `i`; `0` and `n + 1` are the Dirichlet ends.
    pub fn node(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.n).map(|i| self.node(i)).collect()
    }

    /// Point of the complex contour above `x`.
    pub fn contour(&self, x: f64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, self.theta);
        match self.mode {
            ScalingMode::Uniform => x * phase,
            ScalingMode::Exterior { radius } => {
                if x > radius {
                    radius + (x - radius) * phase
                } else if x < -radius {
                    -radius + (x + radius) * phase
                } else {
                    Complex64::new(x, 0.0)
                }
            }
        }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// Same range with the spacing halved `levels` times; existing nodes are kept.
    pub fn refined(&self, levels: u32) -> Self {
        Self { n: (self.n + 1) * (1 << levels) - 1, ..*self }
    }
}

/// `f(x e^{iθ})`.
pub fn scale_function<F>(f: F, theta: f64, x: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    f(x * Complex64::from_polar(1.0, theta))
}

/// Potential fed to [`build_scaled_hamiltonian`].
#[derive(Clone, Copy)]
pub enum ScalablePotential<'a> {
    Piecewise(&'a PiecewisePotential),
    /// Closed form accepting complex arguments.
    Analytic(&'a (dyn Fn(Complex64) -> Complex64 + Sync)),
}

impl ScalablePotential<'_> {
    fn sample(&self, grid: &ScaledGrid, x: f64) -> Complex64 {
        match self {
            ScalablePotential::Piecewise(v) => dual_cell_average(v, grid, x),
            ScalablePotential::Analytic(f) => f(grid.contour(x)),
        }
    }
}

/// Mean of a piecewise potential over the dual cell `[x − h/2, x + h/2]`, measured
/// along the contour. Keeps the scheme second order when a jump or the scaling radius
/// falls inside the cell.
fn dual_cell_average(v: &PiecewisePotential, grid: &ScaledGrid, x: f64) -> Complex64 {
    let half = 0.5 * grid.spacing();
    let (a, b) = (x - half, x + half);
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(v.breakpoints().iter().copied().filter(|p| *p > a && *p < b));
    if let ScalingMode::Exterior { radius } = grid.mode {
        cuts.extend([-radius, radius].into_iter().filter(|p| *p > a && *p < b));
    }
    cuts.sort_by(f64::total_cmp);
    let mut weighted = Complex64::default();
    for w in cuts.windows(2) {
        let length = grid.contour(w[1]) - grid.contour(w[0]);
        weighted += v.value_at(0.5 * (w[0] + w[1])) * length;
    }
    weighted / (grid.contour(b) - grid.contour(a))
}

/// Three-point discretization of `−d²/dz² + V(z)` along the contour, with Dirichlet ends.
///
/// Node spacings are the complex contour increments, so the uniform mode carries the
/// factor `e^{−2iθ}` and the exterior mode switches to it across the scaling radius.
/// A piecewise potential enters through its contour-weighted mean over each dual cell.
pub fn build_scaled_hamiltonian(v: ScalablePotential<'_>, grid: &ScaledGrid) -> Result<Tridiagonal, CScalingError> {
    grid.validate()?;
    if let ScalablePotential::Piecewise(p) = v {
        match grid.mode {
            ScalingMode::Uniform => return Err(CScalingError::ModeMismatch),
            ScalingMode::Exterior { radius } => {
                if radius < p.cutoff() {
                    return Err(CScalingError::InvalidGrid(format!(
                        "scaling radius {radius} inside the potential cutoff {}",
                        p.cutoff()
                    )));
                }
            }
        }
    }
    let n = grid.n;
    let z: Vec<Complex64> = (0..n + 2).map(|i| grid.contour(grid.node(i))).collect();
    let mut sub = Vec::with_capacity(n - 1);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n - 1);
    for i in 1..=n {
        let hl = z[i] - z[i - 1];
        let hr = z[i + 1] - z[i];
        let sum = hl + hr;
        diag.push(2.0 / (hl * hr) + v.sample(grid, grid.node(i)));
        if i > 1 {
            sub.push(-2.0 / (hl * sum));
        }
        if i < n {
            sup.push(-2.0 / (hr * sum));
        }
    }
    Ok(Tridiagonal { sub, diag, sup })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumLabel {
    Bound,
    RotatedContinuum,
    ResonanceCandidate,
}

impl SpectrumLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumLabel::Bound => "bound",
            SpectrumLabel::RotatedContinuum => "rotated_continuum",
            SpectrumLabel::ResonanceCandidate => "resonance_candidate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledSpectrum {
    pub theta: f64,
    /// Sorted by real part.
    pub eigenvalues: Vec<Complex64>,
    /// One label per eigenvalue once classified, empty before.
    pub labels: Vec<SpectrumLabel>,
}

impl ScaledSpectrum {
    pub fn labelled(&self, label: SpectrumLabel) -> impl Iterator<Item = Complex64> + '_ {
        self.eigenvalues.iter().zip(&self.labels).filter(move |(_, l)| **l == label).map(|(e, _)| *e)
    }

    /// Median of `|arg ε + 2θ|` over the rotated-continuum labels.
    pub fn median_ray_deviation(&self) -> Option<f64> {
        let mut devs: Vec<f64> =
            self.labelled(SpectrumLabel::RotatedContinuum).map(|e| (e.arg() + 2.0 * self.theta).abs()).collect();
        if devs.is_empty() {
            return None;
        }
        devs.sort_by(f64::total_cmp);
        let m = devs.len() / 2;
        Some(if devs.len() % 2 == 1 { devs[m] } else { 0.5 * (devs[m - 1] + devs[m]) })
    }
}

fn sorted(mut values: Vec<Complex64>) -> Vec<Complex64> {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    values
}

/// Full spectrum by dense eigensolve; practical up to a few thousand nodes.
pub fn dense_spectrum(h: &Tridiagonal, theta: f64) -> Result<ScaledSpectrum, CScalingError> {
    let eigenvalues = sorted(eigenvalues_dense(&h.to_dense())?);
    Ok(ScaledSpectrum { theta, eigenvalues, labels: Vec::new() })
}

/// Eigenvalues inside `region`, by Newton on the tridiagonal determinant from an
/// `nx × ny` seed lattice.
pub fn regional_spectrum(h: &Tridiagonal, theta: f64, region: &EnergyRegion, nx: usize, ny: usize) -> ScaledSpectrum {
    let eigenvalues = sorted(h.eigenvalues_in(region.re, region.im, nx, ny));
    ScaledSpectrum { theta, eigenvalues, labels: Vec::new() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Distance to a known bound energy that counts as a match.
    pub bound_tol: f64,
    /// Half-width, in radians, of the band around the `−2θ` ray.
    pub ray_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { bound_tol: 1e-6, ray_tol: 0.15 }
    }
}

/// Labels each eigenvalue as a known bound level, a member of the rotated continuum, or
/// an isolated resonance candidate.
pub fn classify_spectrum(mut s: ScaledSpectrum, known_bounds: &[f64], opts: &ClassifyOptions) -> ScaledSpectrum {
    s.labels = s
        .eigenvalues
        .iter()
        .map(|e| {
            if known_bounds.iter().any(|b| (e - b).norm() < opts.bound_tol) {
                SpectrumLabel::Bound
            } else if (e.arg() + 2.0 * s.theta).abs() < opts.ray_tol {
                SpectrumLabel::RotatedContinuum
            } else {
                SpectrumLabel::ResonanceCandidate
            }
        })
        .collect();
    s
}

/// Rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRegion {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl EnergyRegion {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self, CScalingError> {
        if !(re.0 < re.1 && im.0 < im.1) || ![re.0, re.1, im.0, im.1].iter().all(|v| v.is_finite()) {
            return Err(CScalingError::InvalidParameter(format!("empty region re {re:?}, im {im:?}")));
        }
        Ok(Self { re, im })
    }

    pub fn contains(&self, e: Complex64) -> bool {
        e.re >= self.re.0 && e.re <= self.re.1 && e.im >= self.im.0 && e.im <= self.im.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EigenSolver {
    Dense,
    /// Seed lattice for the tridiagonal Newton search.
    Lattice { nx: usize, ny: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    /// Relative drift `|ε(θ₁) − ε(θ₂)| / |ε|` expected of a converged resonance;
    /// trajectories drifting more than ten times this are rejected.
    pub stability_tol: f64,
    pub solver: EigenSolver,
    /// Grid halvings used to Richardson-extrapolate each trajectory point; 0 keeps the
    /// raw eigenvalues of the template grid.
    pub refine_levels: u32,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self { stability_tol: 1e-4, solver: EigenSolver::Lattice { nx: 24, ny: 6 }, refine_levels: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta: f64,
    pub eigenvalue: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Sorted by θ.
    pub points: Vec<ThetaPoint>,
    /// Trajectory point of least `|dε/dθ|`.
    pub resonance: Complex64,
    pub stabilization_theta: f64,
    /// `max |ε(θ) − resonance|` along the trajectory.
    pub drift: f64,
    /// Largest grid-convergence estimate among the extrapolated points (0 without
    /// refinement).
    pub grid_estimate: f64,
}

/// Follows the eigenvalue inside `target` across `thetas` and returns its stabilization
/// point.
///
/// Every eigenvalue in the target at the smallest θ starts a chain, continued by nearest
/// neighbours at the following angles. The chain with the least total motion wins; the
/// rotated continuum sweeps through the target and loses to a θ-stable resonance. With
/// `refine_levels > 0` the winning chain is Richardson-extrapolated point by point before
/// the stabilization point and drift are read off.
pub fn theta_trajectory(
    v: ScalablePotential<'_>,
    template: &ScaledGrid,
    thetas: &[f64],
    target: &EnergyRegion,
    opts: &TrajectoryOptions,
) -> Result<Trajectory, CScalingError> {
    if thetas.len() < 3 {
        return Err(CScalingError::InvalidParameter(format!("need at least 3 angles, got {}", thetas.len())));
    }
    let mut thetas = thetas.to_vec();
    thetas.sort_by(f64::total_cmp);
    let sets: Vec<Vec<Complex64>> = thetas
        .par_iter()
        .map(|&theta| {
            let grid = template.with_theta(theta);
            let h = build_scaled_hamiltonian(v, &grid)?;
            let spectrum = match opts.solver {
                EigenSolver::Dense => dense_spectrum(&h, theta)?,
                EigenSolver::Lattice { nx, ny } => regional_spectrum(&h, theta, target, nx, ny),
            };
            Ok(spectrum.eigenvalues.into_iter().filter(|e| target.contains(*e)).collect())
        })
        .collect::<Result<_, CScalingError>>()?;

    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for &start in &sets[0] {
        let mut chain = vec![start];
        let mut motion = 0.0;
        let mut complete = true;
        for set in &sets[1..] {
            let last = *chain.last().expect("chain starts non-empty");
            match set.iter().min_by(|a, b| (*a - last).norm().total_cmp(&(*b - last).norm())) {
                Some(&next) => {
                    motion += (next - last).norm();
                    chain.push(next);
                }
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete && best.as_ref().is_none_or(|(m, _)| motion < *m) {
            best = Some((motion, chain));
        }
    }
    let (_, mut chain) = best.ok_or(CScalingError::NoCandidate)?;
    let mut grid_estimate = 0.0_f64;
    if opts.refine_levels > 0 {
        let refined: Vec<GridConvergence> = thetas
            .par_iter()
            .zip(chain.par_iter())
            .map(|(&theta, &e)| converge_eigenvalue(v, &template.with_theta(theta), e, opts.refine_levels))
            .collect::<Result<_, _>>()?;
        for (point, c) in chain.iter_mut().zip(&refined) {
            *point = c.extrapolated;
            grid_estimate = grid_estimate.max(c.estimate);
        }
    }

    let m = chain.len();
    let speed = |i: usize| {
        let (a, b) = if i == 0 {
            (0, 1)
        } else if i == m - 1 {
            (m - 2, m - 1)
        } else {
            (i - 1, i + 1)
        };
        (chain[b] - chain[a]).norm() / (thetas[b] - thetas[a])
    };
    let stab = (0..m).min_by(|&a, &b| speed(a).total_cmp(&speed(b))).expect("at least 3 points");
    let resonance = chain[stab];
    let drift = chain.iter().map(|e| (e - resonance).norm()).fold(0.0, f64::max);
    let limit = 10.0 * opts.stability_tol * resonance.norm();
    if drift > limit {
        return Err(CScalingError::Unstable { drift, limit });
    }
    let points = thetas.iter().zip(&chain).map(|(&theta, &eigenvalue)| ThetaPoint { theta, eigenvalue }).collect();
    Ok(Trajectory { points, resonance, stabilization_theta: thetas[stab], drift, grid_estimate })
}

/// Eigenvalue followed through successive grid halvings with Richardson extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConvergence {
    /// `(spacing, eigenvalue)` per level, coarsest first.
    pub levels: Vec<(f64, Complex64)>,
    /// `(4 ε(h/2) − ε(h)) / 3` from the two finest levels.
    pub extrapolated: Complex64,
    /// Change of the extrapolated value between the last two pairs of levels, or the raw
    /// change between the two finest levels when only two exist.
    pub estimate: f64,
}

/// Refines the eigenvalue near `guess` on `grid` and on `levels` successive halvings of
/// its spacing. Each finer level is started from an `h²` extrapolation of the previous two.
pub fn converge_eigenvalue(
    v: ScalablePotential<'_>,
    grid: &ScaledGrid,
    guess: Complex64,
    levels: u32,
) -> Result<GridConvergence, CScalingError> {
    if levels == 0 {
        return Err(CScalingError::InvalidParameter("need at least one refinement level".into()));
    }
    let mut values: Vec<(f64, Complex64)> = Vec::new();
    for level in 0..=levels {
        let g = grid.refined(level);
        let start = match values.len() {
            0 => guess,
            1 => values[0].1,
            len => values[len - 1].1 + (values[len - 1].1 - values[len - 2].1) / 4.0,
        };
        let h = build_scaled_hamiltonian(v, &g)?;
        values.push((g.spacing(), h.nearest_eigenvalue(start, 200)?));
    }
    let richardson = |i: usize| (4.0 * values[i + 1].1 - values[i].1) / 3.0;
    let last = values.len() - 2;
    let extrapolated = richardson(last);
    let estimate = if last >= 1 {
        (extrapolated - richardson(last - 1)).norm()
    } else {
        (values[1].1 - values[0].1).norm()
    };
    Ok(GridConvergence { levels: values, extrapolated, estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn zero(_: Complex64) -> Complex64 {
        Complex64::default()
    }

    #[test]
    fn scale_function_substitutes() {
        let gauss = |z: Complex64| (-z * z).exp();
        let (theta, x) = (0.3, 1.2);
        let expected = (-(x * x) * Complex64::from_polar(1.0, 2.0 * theta)).exp();
        assert!((scale_function(gauss, theta, x) - expected).norm() < 1e-15);
        assert_eq!(scale_function(gauss, 0.0, x), gauss(Complex64::new(x, 0.0)));
        let k = 1.5;
        let wave = |z: Complex64| (Complex64::i() * k * z).exp();
        for x in [2.0, -3.0] {
            assert_relative_eq!(scale_function(wave, theta, x).norm(), (-k * x * theta.sin()).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn box_levels_at_zero_angle() {
        let grid = ScaledGrid::new(0.0, PI, 400, 0.0, ScalingMode::Uniform).unwrap();
        let h = build_scaled_hamiltonian(ScalablePotential::Analytic(&zero), &grid).unwrap();
        let s = dense_spectrum(&h, 0.0).unwrap();
        for (m, e) in s.eigenvalues.iter().take(5).enumerate() {
            let exact = ((m + 1) * (m + 1)) as f64;
            assert!((e.re - exact).abs() < 1e-3 * exact && e.im.abs() < 1e-9, "{e} vs {exact}");
        }
    }

    #[test]
    fn free_spectrum_rotates() {
        let theta = 0.3;
        let grid = ScaledGrid::new(-10.0, 10.0, 200, theta, ScalingMode::Uniform).unwrap();
        let h = build_scaled_hamiltonian(ScalablePotential::Analytic(&zero), &grid).unwrap();
        let dense = h.to_dense();
        assert!((&dense - dense.adjoint()).norm() > 1e-3);
        let s = dense_spectrum(&h, theta).unwrap();
        // Interior modes: away from the top of the band where the stencil saturates.
        let interior: Vec<_> = s.eigenvalues.iter().filter(|e| e.norm() < 100.0).collect();
        assert!(interior.len() > 20);
        for e in interior {
            assert!((e.arg() + 2.0 * theta).abs() < 0.02, "{e}");
        }
    }

    #[test]
    fn piecewise_needs_exterior_mode() {
        let v = PiecewisePotential::square_well(5.0, 2.0).unwrap();
        let grid = ScaledGrid::new(-6.0, 6.0, 100, 0.2, ScalingMode::Uniform).unwrap();
        assert_eq!(build_scaled_hamiltonian(ScalablePotential::Piecewise(&v), &grid), Err(CScalingError::ModeMismatch));
        assert!(ScaledGrid::new(-6.0, 6.0, 10, 0.2, ScalingMode::Uniform).is_err());
        assert!(ScaledGrid::new(-6.0, 6.0, 100, 1.6, ScalingMode::Uniform).is_err());
    }

    #[test]
    fn gaussian_image_matches_closed_form() {
        let theta = 0.25;
        let pot = |z: Complex64| 0.5 * z * z;
        let grid = ScaledGrid::new(-8.0, 8.0, 1599, theta, ScalingMode::Uniform).unwrap();
        let h = build_scaled_hamiltonian(ScalablePotential::Analytic(&pot), &grid).unwrap();
        let xs = grid.nodes();
        let g = nalgebra::DVector::from_iterator(xs.len(), xs.iter().map(|x| Complex64::new((-x * x).exp(), 0.0)));
        let applied = h.apply(&g);
        let rotation = Complex64::from_polar(1.0, -2.0 * theta);
        let mut worst = 0.0_f64;
        for (i, x) in xs.iter().enumerate() {
            let second = (4.0 * x * x - 2.0) * (-x * x).exp();
            let image = -rotation * second + scale_function(pot, theta, *x) * (-x * x).exp();
            worst = worst.max((applied[i] - image).norm());
        }
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn classification_at_zero_angle_has_no_candidates() {
        let v = PiecewisePotential::square_well(4.0, 2.0).unwrap();
        let grid = ScaledGrid::for_potential(&v, 8.0, 399, 0.0).unwrap();
        let h = build_scaled_hamiltonian(ScalablePotential::Piecewise(&v), &grid).unwrap();
        let s = dense_spectrum(&h, 0.0).unwrap();
        assert!(s.eigenvalues.iter().all(|e| e.im.abs() < 1e-10));
        let bounds: Vec<f64> = s.eigenvalues.iter().filter(|e| e.re < 0.0).map(|e| e.re).collect();
        let s = classify_spectrum(s, &bounds, &ClassifyOptions::default());
        assert_eq!(s.labelled(SpectrumLabel::ResonanceCandidate).count(), 0);
    }
}
