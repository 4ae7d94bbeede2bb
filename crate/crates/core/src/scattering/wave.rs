use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::transfer::segment_propagator;
use super::{PiecewisePotential, ScatteringError};

/// Closed form of a solution on one constant segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentForm {
    /// `plus · e^{ik(x − anchor)} + minus · e^{−ik(x − anchor)}`.
    Waves { wavenumber: Complex64, anchor: f64, plus: Complex64, minus: Complex64 },
    /// `value · cos(K(x − anchor)) + slope · sin(K(x − anchor))/K` with `K² = q`; stays
    /// well conditioned as `K → 0`.
    Propagated { q: Complex64, anchor: f64, value: Complex64, slope: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSegment {
    pub left: f64,
    pub right: f64,
    pub potential: f64,
    pub form: SegmentForm,
}

/// `u`, `u'` and `u''` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    pub value: Complex64,
    pub slope: Complex64,
    pub curvature: Complex64,
}

/// Per-segment amplitudes `A e^{ik_j(x − anchor)} + B e^{−ik_j(x − anchor)}` for export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentAmplitudes {
    pub x_left: f64,
    pub x_right: f64,
    pub anchor: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub re_k: f64,
    pub im_k: f64,
}

/// Exact solution of `−u'' + V u = k² u` on a piecewise-constant potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseWave {
    pub k: Complex64,
    pub segments: Vec<WaveSegment>,
}

fn apply(p: &[[Complex64; 2]; 2], s: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (p[0][0] * s.0 + p[0][1] * s.1, p[1][0] * s.0 + p[1][1] * s.1)
}

impl WaveSegment {
    fn q(&self, energy: Complex64) -> Complex64 {
        energy - self.potential
    }

    pub fn eval(&self, energy: Complex64, x: f64) -> WavePoint {
        let (value, slope) = match self.form {
            SegmentForm::Waves { wavenumber, anchor, plus, minus } => {
                let ik = Complex64::i() * wavenumber;
                let e_plus = plus * (ik * (x - anchor)).exp();
                let e_minus = minus * (-ik * (x - anchor)).exp();
                (e_plus + e_minus, ik * (e_plus - e_minus))
            }
            SegmentForm::Propagated { q, anchor, value, slope } => {
                apply(&segment_propagator(q, x - anchor), (value, slope))
            }
        };
        WavePoint { value, slope, curvature: -self.q(energy) * value }
    }

    pub fn amplitudes(&self) -> SegmentAmplitudes {
        let (kj, anchor, a, b) = match self.form {
            SegmentForm::Waves { wavenumber, anchor, plus, minus } => (wavenumber, anchor, plus, minus),
            SegmentForm::Propagated { q, anchor, value, slope } => {
                let kj = q.sqrt();
                if kj.norm() == 0.0 {
                    (kj, anchor, value, slope)
                } else {
                    let d = slope / (Complex64::i() * kj);
                    (kj, anchor, 0.5 * (value + d), 0.5 * (value - d))
                }
            }
        };
        SegmentAmplitudes { x_left: self.left, x_right: self.right, anchor, a, b, re_k: kj.re, im_k: kj.im }
    }
}

impl PiecewiseWave {
    pub fn energy(&self) -> Complex64 {
        self.k * self.k
    }

    /// Solution equal to `plus · e^{ik(x − x_0)} + minus · e^{−ik(x − x_0)}` left of the
    /// interaction region.
    pub fn from_left(v: &PiecewisePotential, k: Complex64, plus: Complex64, minus: Complex64) -> Self {
        let energy = k * k;
        let x0 = v.left_edge();
        let ik = Complex64::i() * k;
        let mut segments = vec![WaveSegment {
            left: f64::NEG_INFINITY,
            right: x0,
            potential: 0.0,
            form: SegmentForm::Waves { wavenumber: k, anchor: x0, plus, minus },
        }];
        let mut state = (plus + minus, ik * (plus - minus));
        for (l, r, value) in v.interior() {
            let q = energy - value;
            segments.push(WaveSegment {
                left: l,
                right: r,
                potential: value,
                form: SegmentForm::Propagated { q, anchor: l, value: state.0, slope: state.1 },
            });
            state = apply(&segment_propagator(q, r - l), state);
        }
        let xn = v.right_edge();
        let (u, du) = state;
        segments.push(WaveSegment {
            left: xn,
            right: f64::INFINITY,
            potential: 0.0,
            form: SegmentForm::Waves {
                wavenumber: k,
                anchor: xn,
                plus: 0.5 * (u + du / ik),
                minus: 0.5 * (u - du / ik),
            },
        });
        Self { k, segments }
    }

    /// Solution equal to `plus · e^{ik(x − x_n)} + minus · e^{−ik(x − x_n)}` right of the
    /// interaction region, continued leftwards.
    pub fn from_right(v: &PiecewisePotential, k: Complex64, plus: Complex64, minus: Complex64) -> Self {
        let energy = k * k;
        let xn = v.right_edge();
        let ik = Complex64::i() * k;
        let mut state = (plus + minus, ik * (plus - minus));
        let mut interior = Vec::new();
        for (l, r, value) in v.interior().collect::<Vec<_>>().into_iter().rev() {
            let q = energy - value;
            state = apply(&segment_propagator(q, l - r), state);
            interior.push(WaveSegment {
                left: l,
                right: r,
                potential: value,
                form: SegmentForm::Propagated { q, anchor: l, value: state.0, slope: state.1 },
            });
        }
        interior.reverse();
        let x0 = v.left_edge();
        let (u, du) = state;
        let mut segments = vec![WaveSegment {
            left: f64::NEG_INFINITY,
            right: x0,
            potential: 0.0,
            form: SegmentForm::Waves {
                wavenumber: k,
                anchor: x0,
                plus: 0.5 * (u + du / ik),
                minus: 0.5 * (u - du / ik),
            },
        }];
        segments.extend(interior);
        segments.push(WaveSegment {
            left: xn,
            right: f64::INFINITY,
            potential: 0.0,
            form: SegmentForm::Waves { wavenumber: k, anchor: xn, plus, minus },
        });
        Self { k, segments }
    }

    /// Left-incidence scattering state `e^{ikx} + L e^{−ikx}` on the left, `S e^{ikx}` on the right.
    pub fn scattering_state(v: &PiecewisePotential, k: Complex64) -> Result<Self, ScatteringError> {
        let s = super::solve_scattering(v, k)?;
        let x0 = v.left_edge();
        let plus = s.incident * (Complex64::i() * k * x0).exp();
        let minus = s.reflected * (-Complex64::i() * k * x0).exp();
        Ok(Self::from_left(v, k, plus, minus))
    }

    pub fn segment_index(&self, x: f64) -> usize {
        // Segments are contiguous; a point on a breakpoint belongs to the right-hand segment.
        self.segments.partition_point(|s| s.right <= x).min(self.segments.len() - 1)
    }

    pub fn eval(&self, x: f64) -> WavePoint {
        self.segments[self.segment_index(x)].eval(self.energy(), x)
    }

    pub fn left_exterior(&self) -> (Complex64, Complex64) {
        match self.segments[0].form {
            SegmentForm::Waves { plus, minus, .. } => (plus, minus),
            SegmentForm::Propagated { .. } => unreachable!("exterior segments use plane waves"),
        }
    }

    pub fn right_exterior(&self) -> (Complex64, Complex64) {
        match self.segments[self.segments.len() - 1].form {
            SegmentForm::Waves { plus, minus, .. } => (plus, minus),
            SegmentForm::Propagated { .. } => unreachable!("exterior segments use plane waves"),
        }
    }

    pub fn amplitudes(&self) -> Vec<SegmentAmplitudes> {
        self.segments.iter().map(WaveSegment::amplitudes).collect()
    }
}

/// Wronskian `u v' − u' v`.
pub fn wronskian(a: &WavePoint, b: &WavePoint) -> Complex64 {
    a.value * b.slope - a.slope * b.value
}
