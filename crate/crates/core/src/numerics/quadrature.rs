use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::{NumericsError, Tolerances};

const MAX_SUBINTERVALS: usize = 40_000;

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Estimated absolute error.
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn finite_or_zero(z: Complex64) -> Complex64 {
    if z.re.is_finite() && z.im.is_finite() {
        z
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite_or_zero(f(center));
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    let mut values = [(Complex64::default(), Complex64::default()); 7];
    for (j, x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let f1 = finite_or_zero(f(center - dx));
        let f2 = finite_or_zero(f(center + dx));
        values[j] = (f1, f2);
        kronrod += (f1 + f2) * WGK[j];
        abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[7];
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let raw = ((kronrod - gauss) * half).norm();
    let mut error = raw;
    if asc != 0.0 && raw != 0.0 {
        error = asc * (200.0 * raw / asc).powf(1.5).min(1.0);
    }
    Panel { a, b, value, error, abs: abs * half.abs() }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a complex-valued integrand.
///
/// Stops when the summed error estimate is below `quad_tol * |I|` (or at rounding
/// level relative to `∫|f|`, which covers integrals that vanish).
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: &Tolerances) -> Result<QuadResult, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod_panel(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut abs = first.abs;
    heap.push(first);
    loop {
        let target = (tol.quad_tol * value.norm()).max(50.0 * f64::EPSILON * abs);
        if error <= target {
            return Ok(QuadResult { value, error, intervals: heap.len() });
        }
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(NumericsError::TolNotReached { estimate: value, error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(NumericsError::TolNotReached { estimate: value, error });
        }
        let left = kronrod_panel(&f, worst.a, mid);
        let right = kronrod_panel(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally to keep the running totals free of drift, and at once
        // when the discarded panel dwarfed what is left.
        if heap.len() % 512 == 0 || worst.abs > 1e3 * abs {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
            abs = heap.iter().map(|p| p.abs).sum();
        }
    }
}

/// `∫_a^∞ f(x) dx` through the substitution `x = a + tan u`.
pub fn integrate_semi_infinite<F>(f: F, a: f64, tol: &Tolerances) -> Result<QuadResult, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    integrate_adaptive(
        |u| {
            let x = a + u.tan();
            if !x.is_finite() {
                return Complex64::default();
            }
            let c = u.cos();
            f(x) / (c * c)
        },
        0.0,
        FRAC_PI_2,
        tol,
    )
}

/// `∫_{-∞}^{∞} f(x) dx` through the substitution `x = tan u`.
pub fn integrate_real_line<F>(f: F, tol: &Tolerances) -> Result<QuadResult, NumericsError>
where
    F: Fn(f64) -> Complex64,
{
    integrate_adaptive(
        |u| {
            let x = u.tan();
            if !x.is_finite() {
                return Complex64::default();
            }
            let c = u.cos();
            f(x) / (c * c)
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        tol,
    )
}
