use num_complex::Complex64;
use rayon::prelude::*;

use super::{NumericsError, Tolerances};

/// Outcome of a converged root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootReport {
    pub root: Complex64,
    pub iterations: usize,
    /// `|f(root)|` of the undeflated function.
    pub residual: f64,
}

/// Central complex difference with step `1e-6 * max(1, |z|)` along the real axis.
///
/// For analytic `f` the derivative is direction independent, so a real step suffices.
pub fn central_derivative<F>(f: &F, z: Complex64) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    let h = 1e-6 * z.norm().max(1.0);
    (f(z + h) - f(z - h)) / (2.0 * h)
}

fn newton_loop<F>(f: &F, z0: Complex64, tol: &Tolerances) -> Result<RootReport, NumericsError>
where
    F: Fn(Complex64) -> Complex64 + ?Sized,
{
    let mut z = z0;
    let mut fz = f(z);
    for iteration in 0..tol.max_iter {
        if !(fz.re.is_finite() && fz.im.is_finite()) {
            return Err(NumericsError::NonFinite("function value during Newton iteration"));
        }
        let residual = fz.norm();
        if residual < tol.root_tol {
            return Ok(RootReport { root: z, iterations: iteration, residual });
        }
        let d = central_derivative(f, z);
        if d.norm() == 0.0 || d.norm() < 1e-14 * residual {
            return Err(NumericsError::DerivativeVanishes { z, residual });
        }
        let mut step = fz / d;
        let mut z_new = z - step;
        let mut f_new = f(z_new);
        // Backtrack while the step overshoots.
        let mut halvings = 0;
        while halvings < 12
            && (!(f_new.re.is_finite() && f_new.im.is_finite()) || f_new.norm() > residual)
        {
            step *= 0.5;
            z_new = z - step;
            f_new = f(z_new);
            halvings += 1;
        }
        z = z_new;
        fz = f_new;
        if step.norm() < tol.step_tol * z.norm().max(1.0) {
            let residual = fz.norm();
            if residual < tol.root_tol {
                return Ok(RootReport { root: z, iterations: iteration + 1, residual });
            }
            return Err(NumericsError::NoConvergence { iterations: iteration + 1, residual });
        }
    }
    Err(NumericsError::NoConvergence { iterations: tol.max_iter, residual: fz.norm() })
}

/// Newton iteration for an analytic `f`, derivative by central difference.
pub fn find_root_newton<F>(f: F, z0: Complex64, tol: &Tolerances) -> Result<RootReport, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
{
    newton_loop(&f, z0, tol)
}

/// Newton iteration on `f(z) / prod_j (z - known_j)`, followed by a short polish on
/// `f` itself so the reported residual refers to the undeflated function.
pub fn find_root_deflated<F>(
    f: F,
    z0: Complex64,
    known: &[Complex64],
    tol: &Tolerances,
) -> Result<RootReport, NumericsError>
where
    F: Fn(Complex64) -> Complex64,
{
    let deflated = |z: Complex64| {
        let mut value = f(z);
        for r in known {
            value /= z - r;
        }
        value
    };
    // Deflated values live on a different scale, so converge on the step size.
    let loose = Tolerances {
        root_tol: f64::MIN_POSITIVE,
        step_tol: 1e-11,
        ..*tol
    };
    let rough = match newton_loop(&deflated, z0, &loose) {
        Ok(report) => report.root,
        Err(NumericsError::NoConvergence { .. }) => {
            return Err(NumericsError::NoConvergence { iterations: tol.max_iter, residual: f(z0).norm() })
        }
        Err(e) => return Err(e),
    };
    let polished = newton_loop(&f, rough, &Tolerances { max_iter: 20, ..*tol })?;
    if (polished.root - rough).norm() > 1e-6 * rough.norm().max(1.0) {
        return Err(NumericsError::NoConvergence { iterations: tol.max_iter, residual: polished.residual });
    }
    Ok(polished)
}

/// Evaluates `|f|` on an `nx` by `ny` lattice spanning the rectangle and returns the
/// lattice points that are strict local minima with respect to their neighbours,
/// ordered by real part then imaginary part.
pub fn scan_local_minima<F>(
    f: &F,
    re: (f64, f64),
    im: (f64, f64),
    nx: usize,
    ny: usize,
) -> Vec<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let nx = nx.max(2);
    let ny = ny.max(2);
    let point = |i: usize, j: usize| {
        Complex64::new(
            re.0 + (re.1 - re.0) * i as f64 / (nx - 1) as f64,
            im.0 + (im.1 - im.0) * j as f64 / (ny - 1) as f64,
        )
    };
    let grid: Vec<Vec<f64>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            (0..ny)
                .map(|j| {
                    let v = f(point(i, j)).norm();
                    if v.is_finite() { v } else { f64::INFINITY }
                })
                .collect()
        })
        .collect();
    let mut seeds = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let v = grid[i][j];
            if !v.is_finite() {
                continue;
            }
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    if grid[ii as usize][jj as usize] <= v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push(point(i, j));
            }
        }
    }
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_real_root() {
        let r = find_root_newton(|z| z * z - 1.0, Complex64::new(0.9, 0.0), &Tolerances::default()).unwrap();
        assert!((r.root - 1.0).norm() < 1e-10);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn newton_finds_imaginary_unit() {
        let r = find_root_newton(|z| z * z + 1.0, Complex64::new(0.2, 0.8), &Tolerances::default()).unwrap();
        assert!((r.root - Complex64::i()).norm() < 1e-10);
    }

    #[test]
    fn newton_reports_vanishing_derivative() {
        let err = find_root_newton(|_| Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0), &Tolerances::default())
            .unwrap_err();
        assert!(matches!(err, NumericsError::DerivativeVanishes { .. }));
    }

    #[test]
    fn newton_gives_up_after_max_iter() {
        // exp has no zeros; iterates drift to -inf along the real axis.
        let tol = Tolerances::default().with_max_iter(5);
        let err = find_root_newton(|z| z.exp(), Complex64::new(0.0, 0.0), &tol).unwrap_err();
        assert!(matches!(err, NumericsError::NoConvergence { .. }));
    }

    #[test]
    fn deflation_avoids_known_root() {
        let f = |z: Complex64| (z - 1.0) * (z - 1.1) * (z + 2.0);
        let tol = Tolerances::default();
        let first = find_root_newton(f, Complex64::new(1.02, 0.0), &tol).unwrap().root;
        let second = find_root_deflated(f, Complex64::new(1.02, 0.0), &[first], &tol).unwrap().root;
        assert!((second - first).norm() > 0.05);
        assert!(f(second).norm() < 1e-10);
    }

    #[test]
    fn local_minima_scan_brackets_roots() {
        let f = |z: Complex64| (z - Complex64::new(0.3, -0.2)) * (z - Complex64::new(-0.5, 0.4));
        let seeds = scan_local_minima(&f, (-1.0, 1.0), (-1.0, 1.0), 41, 41);
        assert_eq!(seeds.len(), 2);
        assert!((seeds[0] - Complex64::new(-0.5, 0.4)).norm() < 0.06);
        assert!((seeds[1] - Complex64::new(0.3, -0.2)).norm() < 0.06);
    }
}
