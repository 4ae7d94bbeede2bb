use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{NumericsError, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit 2-norm eigenvector.
    pub vector: DVector<Complex64>,
    /// `‖Mv − λv‖ / ‖v‖`.
    pub residual: f64,
}

/// Row-major square work matrix.
struct Work {
    n: usize,
    data: Vec<Complex64>,
}

impl Work {
    fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let mut data = vec![Complex64::default(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = m[(i, j)];
            }
        }
        Self { n, data }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::default(); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }
}

fn check_input(m: &DMatrix<Complex64>) -> Result<(), NumericsError> {
    if m.nrows() != m.ncols() {
        return Err(NumericsError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(NumericsError::NonFinite("matrix entry"));
    }
    Ok(())
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q^*`.
fn hessenberg(a: &mut Work, mut q: Option<&mut Work>) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::default(); n];
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a.at(i, k).norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = (k + 2..n).map(|i| a.at(i, k).norm_sqr()).sum();
        if norm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = a.at(k + 1, k);
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a.at(i, k);
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut().take(n).skip(k + 1) {
            *vi /= vnorm;
        }
        // Left: A <- (I - 2 v v^*) A
        for j in k..n {
            let mut s = Complex64::default();
            for i in k + 1..n {
                s += v[i].conj() * a.at(i, j);
            }
            s *= 2.0;
            for i in k + 1..n {
                let val = a.at(i, j) - v[i] * s;
                a.set(i, j, val);
            }
        }
        // Right: A <- A (I - 2 v v^*)
        for i in 0..n {
            let mut s = Complex64::default();
            for j in k + 1..n {
                s += a.at(i, j) * v[j];
            }
            s *= 2.0;
            for j in k + 1..n {
                let val = a.at(i, j) - s * v[j].conj();
                a.set(i, j, val);
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let mut s = Complex64::default();
                for j in k + 1..n {
                    s += q.at(i, j) * v[j];
                }
                s *= 2.0;
                for j in k + 1..n {
                    let val = q.at(i, j) - s * v[j].conj();
                    q.set(i, j, val);
                }
            }
        }
        for i in k + 2..n {
            a.set(i, k, Complex64::default());
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::default());
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let rho = ax.hypot(ay);
    (ax / rho, (x / ax) * y.conj() / rho)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mu1 = (a + d) * 0.5 + disc;
    let mu2 = (a + d) * 0.5 - disc;
    if (mu1 - d).norm() < (mu2 - d).norm() { mu1 } else { mu2 }
}

/// Shifted QR iteration on a Hessenberg matrix. With `full` the whole Schur form
/// (and `q`) is maintained; otherwise only the active window is updated.
fn schur(h: &mut Work, mut q: Option<&mut Work>, full: bool) -> Result<(), NumericsError> {
    let n = h.n;
    if n == 0 {
        return Ok(());
    }
    let max_total = 60 * n.max(1);
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut first_sweep = true;
    let mut hi = n - 1;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    while hi > 0 {
        // Locate the bottom of the unreduced block.
        let mut l = hi;
        while l > 0 {
            let s = h.at(l - 1, l - 1).norm() + h.at(l, l).norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h.at(l, l - 1).norm() <= f64::EPSILON * s {
                h.set(l, l - 1, Complex64::default());
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(NumericsError::NoConvergence { iterations: total, residual: h.at(hi, hi - 1).norm() });
        }
        let mu = if first_sweep {
            first_sweep = false;
            Complex64::default()
        } else if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            let sub = h.at(hi, hi - 1).norm() + if hi >= 2 { h.at(hi - 1, hi - 2).norm() } else { 0.0 };
            h.at(hi, hi) + Complex64::new(0.75 * sub, 0.43 * sub)
        } else {
            wilkinson_shift(h.at(hi - 1, hi - 1), h.at(hi - 1, hi), h.at(hi, hi - 1), h.at(hi, hi))
        };
        let col_end = if full { n } else { hi + 1 };
        let row_start = if full { 0 } else { l };
        for k in l..=hi {
            let v = h.at(k, k) - mu;
            h.set(k, k, v);
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h.at(k, k), h.at(k + 1, k));
            rot.push((c, s));
            for j in k..col_end {
                let a = h.at(k, j);
                let b = h.at(k + 1, j);
                h.set(k, j, a * c + s * b);
                h.set(k + 1, j, -s.conj() * a + b * c);
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            let row_end = (k + 2).min(hi);
            for i in row_start..=row_end {
                let a = h.at(i, k);
                let b = h.at(i, k + 1);
                h.set(i, k, a * c + b * s.conj());
                h.set(i, k + 1, -a * s + b * c);
            }
            if let Some(q) = q.as_deref_mut() {
                for i in 0..n {
                    let a = q.at(i, k);
                    let b = q.at(i, k + 1);
                    q.set(i, k, a * c + b * s.conj());
                    q.set(i, k + 1, -a * s + b * c);
                }
            }
        }
        for k in l..=hi {
            let v = h.at(k, k) + mu;
            h.set(k, k, v);
        }
    }
    Ok(())
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All eigenvalues of a dense complex matrix, sorted by real part (then imaginary part).
pub fn eigenvalues_dense(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>, NumericsError> {
    check_input(m)?;
    let mut h = Work::from_matrix(m);
    hessenberg(&mut h, None);
    schur(&mut h, None, false)?;
    let mut values: Vec<Complex64> = (0..h.n).map(|i| h.at(i, i)).collect();
    values.sort_by(sort_key);
    Ok(values)
}

/// All eigenpairs of a dense complex matrix: Hessenberg reduction, shifted QR to
/// Schur form, back substitution for the triangular eigenvectors.
pub fn eig_dense(m: &DMatrix<Complex64>, tol: &Tolerances) -> Result<Vec<EigenPair>, NumericsError> {
    check_input(m)?;
    let n = m.nrows();
    let mut t = Work::from_matrix(m);
    let mut q = Work::identity(n);
    hessenberg(&mut t, Some(&mut q));
    schur(&mut t, Some(&mut q), true)?;

    let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let small = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    let mut pairs = Vec::with_capacity(n);
    let mut y = vec![Complex64::default(); n];
    for k in 0..n {
        let lambda = t.at(k, k);
        y.iter_mut().for_each(|v| *v = Complex64::default());
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::default();
            for j in i + 1..=k {
                s += t.at(i, j) * y[j];
            }
            let mut denom = t.at(i, i) - lambda;
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            y[i] = -s / denom;
            if y[i].norm() > 1e100 {
                let scale = 1.0 / y[i].norm();
                for v in y.iter_mut().take(k + 1) {
                    *v *= scale;
                }
            }
        }
        let mut v = DVector::from_element(n, Complex64::default());
        for i in 0..n {
            let mut s = Complex64::default();
            for j in 0..=k {
                s += q.at(i, j) * y[j];
            }
            v[i] = s;
        }
        let vnorm = v.norm();
        v /= Complex64::new(vnorm, 0.0);
        let residual = (m * &v - &v * lambda).norm();
        if !(residual <= tol.eig_tol * norm.max(1.0)) {
            return Err(NumericsError::NoConvergence { iterations: k, residual });
        }
        pairs.push(EigenPair { value: lambda, vector: v, residual });
    }
    pairs.sort_by(|a, b| sort_key(&a.value, &b.value));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]));
        let pairs = eig_dense(&m, &Tolerances::default()).unwrap();
        let values: Vec<f64> = pairs.iter().map(|p| p.value.re).collect();
        assert_eq!(values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rotation_generator_has_imaginary_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let pairs = eig_dense(&m, &Tolerances::default()).unwrap();
        let mut ims: Vec<f64> = pairs.iter().map(|p| p.value.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);
        assert!(pairs.iter().all(|p| p.value.re.abs() < 1e-12));
    }

    #[test]
    fn random_matrix_residuals_and_trace() {
        let n = 40;
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = DMatrix::from_fn(n, n, |_, _| c(next(), next()));
        let pairs = eig_dense(&m, &Tolerances::default()).unwrap();
        assert_eq!(pairs.len(), n);
        let trace: Complex64 = (0..n).map(|i| m[(i, i)]).sum();
        let sum: Complex64 = pairs.iter().map(|p| p.value).sum();
        let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((trace - sum).norm() < 1e-8 * norm);
        for w in pairs.windows(2) {
            assert!(w[0].value.re <= w[1].value.re);
        }
        let fast = eigenvalues_dense(&m).unwrap();
        for (a, b) in fast.iter().zip(pairs.iter()) {
            assert!((a - b.value).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_square() {
        let m = DMatrix::from_element(2, 3, c(1.0, 0.0));
        assert!(matches!(eig_dense(&m, &Tolerances::default()), Err(NumericsError::NotSquare { .. })));
    }
}
