use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transfer::local_jost;
use super::{PiecewisePotential, ScatteringError};
use crate::numerics::{
    central_derivative, find_root_deflated, find_root_newton, scan_local_minima, Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleKind {
    Bound,
    Antibound,
    Resonance,
}

impl PoleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoleKind::Bound => "bound",
            PoleKind::Antibound => "antibound",
            PoleKind::Resonance => "resonance",
        }
    }
}

/// Zero of the Jost function: a pole of the transmission amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub k: Complex64,
    pub epsilon: Complex64,
    pub kind: PoleKind,
    /// `|jost|` at `k`, with the Jost function referenced to the region edges.
    pub residual: f64,
}

impl Pole {
    /// Builds a pole record, classifying by quadrant. Left half-plane points (mirror
    /// images of fourth-quadrant poles) and first-quadrant points are rejected.
    pub fn classify(k: Complex64, residual: f64) -> Option<Self> {
        let on_axis = k.re.abs() <= 1e-9 * k.norm().max(1.0);
        let kind = if on_axis {
            if k.im > 0.0 {
                PoleKind::Bound
            } else {
                PoleKind::Antibound
            }
        } else if k.re > 0.0 && k.im < 0.0 {
            PoleKind::Resonance
        } else {
            return None;
        };
        let k = if on_axis { Complex64::new(0.0, k.im) } else { k };
        Some(Self { k, epsilon: k * k, kind, residual })
    }

    /// Resonance energy `Re ε`.
    pub fn energy(&self) -> f64 {
        self.epsilon.re
    }

    /// Full width `Γ = −2 Im ε`.
    pub fn width(&self) -> f64 {
        -2.0 * self.epsilon.im
    }
}

/// Closed rectangle in the complex `k` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KRegion {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl KRegion {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self, ScatteringError> {
        let ok = [re.0, re.1, im.0, im.1].iter().all(|v| v.is_finite()) && re.0 < re.1 && im.0 < im.1;
        if !ok {
            return Err(ScatteringError::InvalidRegion(format!("re {re:?}, im {im:?}")));
        }
        Ok(Self { re, im })
    }

    pub fn contains(&self, k: Complex64) -> bool {
        k.re >= self.re.0 && k.re <= self.re.1 && k.im >= self.im.0 && k.im <= self.im.1
    }

    /// Region holding the bound states and the lowest resonances of `v`.
    pub fn default_for(v: &PiecewisePotential) -> Self {
        let depth = (-v.min_value()).max(0.0).sqrt();
        let top = v.max_abs_value().sqrt().max(1.0);
        Self { re: (0.0, 2.0 * top.min(6.0).max(1.0) + 4.0), im: (-2.0, depth + 1.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleSearch {
    /// Seed lattice per tile.
    pub nx: usize,
    pub ny: usize,
    /// Times a tile may be split when roots crowd within four grid cells.
    pub max_refinements: usize,
    pub tol: Tolerances,
}

impl Default for PoleSearch {
    fn default() -> Self {
        Self { nx: 80, ny: 80, max_refinements: 3, tol: Tolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    /// Sorted by `Re k`, then `Im k`.
    pub poles: Vec<Pole>,
    /// Seeds whose Newton iteration failed.
    pub skipped_seeds: usize,
    /// Index pairs of distinct poles closer than `1e-6 · max(1, |k|)`.
    pub overlaps: Vec<(usize, usize)>,
}

impl PoleSet {
    pub fn of_kind(&self, kind: PoleKind) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(move |p| p.kind == kind)
    }
}

fn axis_value(v: &PiecewisePotential, kappa: f64) -> f64 {
    local_jost(v, Complex64::new(0.0, kappa)).re
}

/// Sign changes of the (real) Jost function along `k = iκ`, for `κ` between `from` and
/// `to` on one side of zero, refined by bisection to rounding level.
fn axis_roots(v: &PiecewisePotential, from: f64, to: f64) -> Vec<f64> {
    debug_assert!(from.signum() == to.signum() || from == 0.0);
    let sign = if to < 0.0 { -1.0 } else { 1.0 };
    let (lo, hi) = (from.abs(), to.abs());
    let widths: Vec<(f64, f64)> = v.interior().map(|(l, r, value)| (PI / (16.0 * (r - l)), value)).collect();
    let min_step = widths.iter().map(|w| w.0).fold(1.0, f64::min);
    let floor = 1e-9 * (1.0 + v.max_abs_value().sqrt());
    let mut kappa = lo.max(floor);
    let mut f_prev = axis_value(v, sign * kappa);
    let mut roots = Vec::new();
    while kappa < hi {
        let energy = -kappa * kappa;
        // Keep every segment phase change below π/16 per step.
        let de = widths
            .iter()
            .map(|(a, value)| 2.0 * a * (energy - value).max(0.0).sqrt() + a * a)
            .fold(f64::INFINITY, f64::min);
        let from_energy = (kappa * kappa + de).sqrt() - kappa;
        let step = from_energy.min(min_step).min((0.25 * kappa).max(floor));
        let next = (kappa + step).min(hi);
        let f_next = axis_value(v, sign * next);
        if f_prev == 0.0 {
            roots.push(sign * kappa);
        } else if f_prev.signum() != f_next.signum() && f_next != 0.0 {
            let (mut a, mut b, mut fa) = (kappa, next, f_prev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = axis_value(v, sign * m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(sign * 0.5 * (a + b));
        }
        kappa = next;
        f_prev = f_next;
    }
    roots
}

#[derive(Debug, Clone, Copy)]
struct Tile {
    re: (f64, f64),
    im: (f64, f64),
    depth: usize,
}

struct TileRoots {
    roots: Vec<(Complex64, f64)>,
    skipped: usize,
}

/// Extra Newton steps after convergence so that repeated hits of one zero agree to
/// rounding level.
fn polish<F: Fn(Complex64) -> Complex64>(f: &F, mut z: Complex64) -> (Complex64, f64) {
    let mut r = f(z).norm();
    for _ in 0..4 {
        let d = central_derivative(f, z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - f(z) / d;
        let rc = f(cand).norm();
        if !(rc < r) {
            break;
        }
        z = cand;
        r = rc;
    }
    (z, r)
}

fn same_root(a: Complex64, b: Complex64, tol: &Tolerances) -> bool {
    (a - b).norm() < 10.0 * tol.step_tol * a.norm().max(1.0) + 1e-9 * a.norm().max(1.0)
}

fn scan_tile<F>(f: &F, tile: Tile, search: &PoleSearch) -> TileRoots
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let seeds = scan_local_minima(f, tile.re, tile.im, search.nx, search.ny);
    let mut roots: Vec<(Complex64, f64)> = Vec::new();
    let mut skipped = 0;
    for seed in seeds {
        let plain = find_root_newton(f, seed, &search.tol);
        let found = match plain {
            Ok(r) if roots.iter().any(|(z, _)| same_root(*z, r.root, &search.tol)) => {
                let known: Vec<Complex64> = roots.iter().map(|(z, _)| *z).collect();
                find_root_deflated(f, seed, &known, &search.tol)
            }
            other => other,
        };
        match found {
            Ok(r) => {
                let (z, res) = polish(f, r.root);
                if !roots.iter().any(|(w, _)| same_root(*w, z, &search.tol)) {
                    roots.push((z, res));
                }
            }
            Err(e) => {
                log::debug!("pole seed {seed} skipped: {e}");
                skipped += 1;
            }
        }
    }
    TileRoots { roots, skipped }
}

fn crowded(roots: &[(Complex64, f64)], tile: &Tile, search: &PoleSearch) -> bool {
    let cell = ((tile.re.1 - tile.re.0) / (search.nx.max(2) - 1) as f64)
        .max((tile.im.1 - tile.im.0) / (search.ny.max(2) - 1) as f64);
    let inside: Vec<Complex64> = roots
        .iter()
        .map(|r| r.0)
        .filter(|z| z.re >= tile.re.0 && z.re <= tile.re.1 && z.im >= tile.im.0 && z.im <= tile.im.1)
        .collect();
    inside.iter().enumerate().any(|(i, a)| inside[i + 1..].iter().any(|b| (a - b).norm() < 4.0 * cell))
}

fn process_tile<F>(f: &F, tile: Tile, search: &PoleSearch) -> TileRoots
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let result = scan_tile(f, tile, search);
    if tile.depth >= search.max_refinements || !crowded(&result.roots, &tile, search) {
        return result;
    }
    let rm = 0.5 * (tile.re.0 + tile.re.1);
    let im = 0.5 * (tile.im.0 + tile.im.1);
    let children = [
        Tile { re: (tile.re.0, rm), im: (tile.im.0, im), depth: tile.depth + 1 },
        Tile { re: (rm, tile.re.1), im: (tile.im.0, im), depth: tile.depth + 1 },
        Tile { re: (tile.re.0, rm), im: (im, tile.im.1), depth: tile.depth + 1 },
        Tile { re: (rm, tile.re.1), im: (im, tile.im.1), depth: tile.depth + 1 },
    ];
    let parts: Vec<TileRoots> = children.par_iter().map(|t| process_tile(f, *t, search)).collect();
    let mut merged = result;
    for part in parts {
        merged.skipped += part.skipped;
        for r in part.roots {
            if !merged.roots.iter().any(|(w, _)| same_root(*w, r.0, &search.tol)) {
                merged.roots.push(r);
            }
        }
    }
    merged
}

/// Tiles sized so that each carries a bounded change of the interior phase `Σ K_j w_j`.
fn initial_tiles(v: &PiecewisePotential, re: (f64, f64), im: (f64, f64)) -> Vec<Tile> {
    let mut rate: f64 = 0.0;
    for i in 0..9 {
        for j in 0..9 {
            let k = Complex64::new(re.0 + (re.1 - re.0) * i as f64 / 8.0, im.0 + (im.1 - im.0) * j as f64 / 8.0);
            let r: f64 = v
                .interior()
                .map(|(l, r, value)| {
                    let kk = (k * k - value).sqrt();
                    (r - l) * (k.norm() / kk.norm().max(1e-3)).min(1e3)
                })
                .sum();
            rate = rate.max(r);
        }
    }
    let budget = 4.0 * PI;
    let count = |extent: f64| ((rate.max(1.0) * extent / budget).ceil() as usize).clamp(1, 256);
    let (nre, nim) = (count(re.1 - re.0), count(im.1 - im.0));
    let mut tiles = Vec::with_capacity(nre * nim);
    for i in 0..nre {
        for j in 0..nim {
            tiles.push(Tile {
                re: (re.0 + (re.1 - re.0) * i as f64 / nre as f64, re.0 + (re.1 - re.0) * (i + 1) as f64 / nre as f64),
                im: (im.0 + (im.1 - im.0) * j as f64 / nim as f64, im.0 + (im.1 - im.0) * (j + 1) as f64 / nim as f64),
                depth: 0,
            });
        }
    }
    tiles
}

/// All zeros of the Jost function inside `region`.
///
/// Bound and antibound states come from a sign-change sweep of the real Jost function
/// along the imaginary axis. Resonances come from a tiled grid scan of `|jost|`
/// seeding Newton iterations, with deflation when a seed falls back onto a known zero
/// and tile refinement where zeros crowd. Left half-plane mirror images are omitted.
pub fn find_poles(
    v: &PiecewisePotential,
    region: &KRegion,
    search: &PoleSearch,
) -> Result<PoleSet, ScatteringError> {
    search.tol.validate()?;
    let f = |k: Complex64| local_jost(v, k);
    let mut candidates: Vec<(Complex64, f64)> = Vec::new();

    let covers_axis = region.re.0 <= 0.0 && region.re.1 >= 0.0;
    if covers_axis {
        let mut kappas = Vec::new();
        if region.im.1 > 0.0 {
            kappas.extend(axis_roots(v, region.im.0.max(0.0), region.im.1));
        }
        if region.im.0 < 0.0 {
            kappas.extend(axis_roots(v, region.im.1.min(0.0), region.im.0));
        }
        for kappa in kappas {
            let k = Complex64::new(0.0, kappa);
            candidates.push((k, f(k).norm()));
        }
    }

    // For a real potential the only zeros off the imaginary axis lie in the lower half
    // plane, so the grid scan stops just above the real axis.
    let scan_re = (region.re.0.max(0.0), region.re.1);
    let scan_im = (region.im.0, region.im.1.min(0.05 * (region.im.1 - region.im.0)));
    if scan_re.1 > scan_re.0 && scan_im.1 > scan_im.0 {
        let tiles = initial_tiles(v, scan_re, scan_im);
        let results: Vec<TileRoots> = tiles.par_iter().map(|t| process_tile(&f, *t, search)).collect();
        let mut skipped = 0;
        let mut roots: Vec<(Complex64, f64)> = Vec::new();
        for r in results {
            skipped += r.skipped;
            roots.extend(r.roots);
        }
        for (z, res) in roots {
            let on_axis = z.re.abs() <= 1e-7 * z.norm().max(1.0);
            if on_axis && covers_axis {
                continue;
            }
            candidates.push((z, res));
        }
        return Ok(assemble(candidates, region, &search.tol, skipped));
    }
    Ok(assemble(candidates, region, &search.tol, 0))
}

fn assemble(mut candidates: Vec<(Complex64, f64)>, region: &KRegion, tol: &Tolerances, skipped: usize) -> PoleSet {
    candidates.retain(|(z, _)| region.contains(*z) && z.norm() > 1e-12);
    candidates.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut kept: Vec<(Complex64, f64)> = Vec::new();
    for c in candidates {
        match kept.iter_mut().find(|(z, _)| same_root(*z, c.0, tol)) {
            Some(existing) => {
                if c.1 < existing.1 {
                    *existing = c;
                }
            }
            None => kept.push(c),
        }
    }
    let mut poles: Vec<Pole> = kept.into_iter().filter_map(|(z, r)| Pole::classify(z, r)).collect();
    poles.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    let mut overlaps = Vec::new();
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            if (poles[i].k - poles[j].k).norm() < 1e-6 * poles[i].k.norm().max(1.0) {
                log::warn!("overlapping poles at {} and {}", poles[i].k, poles[j].k);
                overlaps.push((i, j));
            }
        }
    }
    PoleSet { poles, skipped_seeds: skipped, overlaps }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    R0,
    R1,
}

/// Sheet of the two-sheeted energy surface on which `(ε, k)` lies: `R0` for
/// `Im k ≥ 0`, `R1` below the real axis.
pub fn riemann_sheet_label(epsilon: Complex64, k: Complex64) -> Result<Sheet, ScatteringError> {
    if (k * k - epsilon).norm() > 1e-10 * epsilon.norm().max(1.0) {
        return Err(ScatteringError::InconsistentPair { epsilon, k });
    }
    Ok(if k.im >= 0.0 { Sheet::R0 } else { Sheet::R1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shallow_well_has_one_bound_state() {
        let v = PiecewisePotential::square_well(1.0, 1.0).unwrap();
        let region = KRegion::new((-1.0, 3.0), (-1.5, 2.0)).unwrap();
        let set = find_poles(&v, &region, &PoleSearch::default()).unwrap();
        assert_eq!(set.of_kind(PoleKind::Bound).count(), 1);
    }

    #[test]
    fn poles_are_sorted_and_classified() {
        let v = PiecewisePotential::square_well(30.0, 2.0).unwrap();
        let region = KRegion::new((0.0, 8.0), (-3.0, 6.0)).unwrap();
        let set = find_poles(&v, &region, &PoleSearch::default()).unwrap();
        assert!(set.poles.windows(2).all(|w| w[0].k.re <= w[1].k.re));
        for p in &set.poles {
            assert!(p.residual < 1e-9, "{p:?}");
            match p.kind {
                PoleKind::Bound => assert!(p.k.re == 0.0 && p.k.im > 0.0),
                PoleKind::Antibound => assert!(p.k.re == 0.0 && p.k.im < 0.0),
                PoleKind::Resonance => assert!(p.k.re > 0.0 && p.k.im < 0.0),
            }
        }
        assert!(set.of_kind(PoleKind::Resonance).count() >= 3);
    }

    #[test]
    fn sheet_labels() {
        let k = Complex64::new(0.0, 2.0);
        assert_eq!(riemann_sheet_label(k * k, k).unwrap(), Sheet::R0);
        let k = Complex64::new(3.0, -0.2);
        assert_eq!(riemann_sheet_label(k * k, k).unwrap(), Sheet::R1);
        let k = Complex64::new(1.5, 0.0);
        assert_eq!(riemann_sheet_label(k * k, k).unwrap(), Sheet::R0);
        assert!(riemann_sheet_label(Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)).is_err());
    }
}
