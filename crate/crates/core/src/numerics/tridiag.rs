use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::NumericsError;

/// Complex tridiagonal operator. `sub[i]` sits at `(i + 1, i)`, `sup[i]` at `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.len();
        let mut m = DMatrix::from_element(n, n, Complex64::default());
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.sub[i];
                m[(i, i + 1)] = self.sup[i];
            }
        }
        m
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.len();
        DVector::from_fn(n, |i, _| {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.sub[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.sup[i] * v[i + 1];
            }
            s
        })
    }

    /// `d/dλ ln det(T − λ)`, accumulated through the ratios of consecutive
    /// leading principal minors so that the determinant itself never overflows.
    pub fn log_det_derivative(&self, lambda: Complex64) -> Complex64 {
        let n = self.len();
        let floor = f64::EPSILON * (self.diag.iter().map(|d| d.norm()).fold(1.0, f64::max));
        let mut r = self.diag[0] - lambda;
        if r.norm() < floor {
            r = Complex64::new(floor, 0.0);
        }
        let mut d = Complex64::new(-1.0, 0.0);
        let mut sum = d / r;
        for j in 1..n {
            let p = self.sub[j - 1] * self.sup[j - 1];
            let r_prev = r;
            let d_prev = d;
            r = (self.diag[j] - lambda) - p / r_prev;
            if r.norm() < floor {
                r = Complex64::new(floor, 0.0);
            }
            d = -1.0 + p * d_prev / (r_prev * r_prev);
            sum += d / r;
        }
        sum
    }

    /// Newton iteration on `det(T − λ)` started at `guess`.
    pub fn refine_eigenvalue(&self, guess: Complex64, max_iter: usize) -> Result<Complex64, NumericsError> {
        self.newton(guess, max_iter, |_| true)
    }

    fn row_scale(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let mut r = self.diag[i].norm();
                if i > 0 {
                    r += self.sub[i - 1].norm();
                }
                if i + 1 < self.len() {
                    r += self.sup[i].norm();
                }
                r
            })
            .fold(0.0, f64::max)
    }

    /// Newton iteration that gives up as soon as an iterate leaves `keep`.
    fn newton<K>(&self, guess: Complex64, max_iter: usize, keep: K) -> Result<Complex64, NumericsError>
    where
        K: Fn(Complex64) -> bool,
    {
        // Below this the step is rounding noise in the minor ratios.
        let floor = 64.0 * f64::EPSILON * self.row_scale();
        let mut lambda = guess;
        for _ in 0..max_iter {
            let s = self.log_det_derivative(lambda);
            if !(s.re.is_finite() && s.im.is_finite()) || s.norm() == 0.0 {
                return Err(NumericsError::NonFinite("tridiagonal determinant derivative"));
            }
            let step = 1.0 / s;
            lambda -= step;
            if step.norm() < (1e-14 * lambda.norm().max(1.0)).max(floor) {
                return Ok(lambda);
            }
            if !keep(lambda) {
                return Err(NumericsError::NoConvergence { iterations: max_iter, residual: step.norm() });
            }
        }
        Err(NumericsError::NoConvergence { iterations: max_iter, residual: f64::NAN })
    }

    /// Eigenvalue closest to `shift`: shifted inverse iteration until the estimate
    /// settles, then guarded Newton polishing.
    pub fn nearest_eigenvalue(&self, shift: Complex64, max_iter: usize) -> Result<Complex64, NumericsError> {
        let n = self.len();
        let lu = ShiftedLu::factor(self, shift);
        let mut x: Vec<Complex64> =
            (0..n).map(|j| Complex64::new(1.0, 0.5 * (j as f64 * 0.618).sin())).collect();
        normalize(&mut x);
        let mut estimate = shift;
        let mut change = f64::INFINITY;
        for _ in 0..max_iter {
            let mut y = x.clone();
            lu.solve(&mut y);
            let yy: f64 = y.iter().map(|v| v.norm_sqr()).sum();
            let yx: Complex64 = y.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
            if !(yy.is_finite() && yy > 0.0) {
                // The shift is an eigenvalue to working precision.
                return Ok(shift);
            }
            let next = shift + yx / yy;
            change = (next - estimate).norm();
            estimate = next;
            x = y;
            normalize(&mut x);
            if change < 1e-10 * estimate.norm().max(1.0) {
                break;
            }
        }
        let radius = (100.0 * change).max(1e-8 * estimate.norm().max(1.0));
        self.newton(estimate, 50, |z| (z - estimate).norm() < radius)
    }

    /// Eigenvalues inside the rectangle `re × im`, found by Newton from an
    /// `nx` by `ny` lattice of seeds. Iterates straying further than the rectangle's
    /// larger side from it are abandoned. Sorted by real part.
    pub fn eigenvalues_in(&self, re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> Vec<Complex64> {
        let mut found: Vec<Complex64> = Vec::new();
        let nx = nx.max(1);
        let ny = ny.max(1);
        let reach = (re.1 - re.0).max(im.1 - im.0);
        let near = |z: Complex64| {
            z.re > re.0 - reach && z.re < re.1 + reach && z.im > im.0 - reach && z.im < im.1 + reach
        };
        for i in 0..nx {
            for j in 0..ny {
                let seed = Complex64::new(
                    re.0 + (re.1 - re.0) * (i as f64 + 0.5) / nx as f64,
                    im.0 + (im.1 - im.0) * (j as f64 + 0.5) / ny as f64,
                );
                if let Ok(lambda) = self.newton(seed, 80, near) {
                    let inside = lambda.re >= re.0 && lambda.re <= re.1 && lambda.im >= im.0 && lambda.im <= im.1;
                    let duplicate = found.iter().any(|f| (f - lambda).norm() < 1e-9 * lambda.norm().max(1.0));
                    if inside && !duplicate {
                        found.push(lambda);
                    }
                }
            }
        }
        found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        found
    }
}

fn normalize(x: &mut [Complex64]) {
    let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// LU factors of `T − σ` with partial pivoting, in the layout of LAPACK's `gttrf`.
struct ShiftedLu {
    dl: Vec<Complex64>,
    d: Vec<Complex64>,
    du: Vec<Complex64>,
    du2: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &Tridiagonal, shift: Complex64) -> Self {
        let n = t.len();
        let mut dl = t.sub.clone();
        let mut d: Vec<Complex64> = t.diag.iter().map(|v| v - shift).collect();
        let mut du = t.sup.clone();
        let mut du2 = vec![Complex64::default(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * t.row_scale().max(f64::MIN_POSITIVE);
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() == 0.0 {
                    d[i] = Complex64::new(tiny, 0.0);
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if n > 0 && d[n - 1].norm() == 0.0 {
            d[n - 1] = Complex64::new(tiny, 0.0);
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [Complex64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let bi = b[i];
                b[i + 1] -= self.dl[i] * bi;
            }
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.du2[i] * b[i + 2];
            }
            b[i] = v / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize, h: f64) -> Tridiagonal {
        let off = Complex64::new(-1.0 / (h * h), 0.0);
        Tridiagonal {
            sub: vec![off; n - 1],
            diag: vec![Complex64::new(2.0 / (h * h), 0.0); n],
            sup: vec![off; n - 1],
        }
    }

    #[test]
    fn refines_box_levels() {
        let n = 2000;
        let h = PI / (n + 1) as f64;
        let t = laplacian(n, h);
        for m in 1..=3 {
            let exact = 4.0 / (h * h) * ((m as f64) * h / 2.0).sin().powi(2);
            let got = t.refine_eigenvalue(Complex64::new(exact * 1.05, 0.01), 60).unwrap();
            assert!((got.re - exact).abs() < 1e-9 * exact, "m={m}: {got} vs {exact}");
        }
    }

    #[test]
    fn region_search_matches_dense() {
        let mut t = laplacian(30, 0.1);
        for (i, d) in t.diag.iter_mut().enumerate() {
            *d += Complex64::new(0.0, -0.01 * i as f64);
        }
        let dense = super::super::eigenvalues_dense(&t.to_dense()).unwrap();
        let inside: Vec<_> = dense.iter().filter(|z| z.re < 100.0).cloned().collect();
        let found = t.eigenvalues_in((0.0, 100.0), (-1.0, 0.1), 40, 4);
        assert_eq!(found.len(), inside.len());
        for (a, b) in found.iter().zip(inside.iter()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn pivoted_solve_matches_dense() {
        let t = Tridiagonal {
            sub: vec![Complex64::new(3.0, 1.0), Complex64::new(-2.0, 0.5), Complex64::new(0.1, 0.0)],
            diag: vec![Complex64::new(0.01, 0.0), Complex64::new(1.0, -1.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.3)],
            sup: vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 2.0), Complex64::new(-1.0, 1.0)],
        };
        let shift = Complex64::new(0.2, 0.1);
        let lu = ShiftedLu::factor(&t, shift);
        let rhs = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, -1.0), Complex64::new(0.5, 0.5)];
        let mut x = rhs.clone();
        lu.solve(&mut x);
        let shifted = Tridiagonal { diag: t.diag.iter().map(|d| d - shift).collect(), ..t.clone() };
        let back = shifted.apply(&DVector::from_vec(x));
        for (a, b) in back.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn nearest_eigenvalue_picks_the_closest() {
        let mut t = laplacian(300, 0.05);
        for (i, d) in t.diag.iter_mut().enumerate() {
            *d += Complex64::new(0.0, -0.002 * i as f64);
        }
        let dense = super::super::eigenvalues_dense(&t.to_dense()).unwrap();
        for guess in [Complex64::new(30.0, 0.0), Complex64::new(400.0, -0.2), Complex64::new(1500.0, 0.0)] {
            let closest = dense.iter().min_by(|a, b| (*a - guess).norm().total_cmp(&(*b - guess).norm())).unwrap();
            let got = t.nearest_eigenvalue(guess, 200).unwrap();
            assert!((got - closest).norm() < 1e-9 * closest.norm(), "{got} vs {closest}");
        }
    }
}
