use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PiecewisePotential, ScatteringError};

pub type Mat2 = [[Complex64; 2]; 2];

const IDENTITY: Mat2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

/// Matching is declared singular below this modulus.
const SINGULAR: f64 = 1e-14;

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `sin z / z`, entire.
fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Maps `(u, u')` at one end of a constant segment to the other end, `dx` apart,
/// for `u'' = −q u`. The entries are entire in `q`, so no branch choice enters.
pub fn segment_propagator(q: Complex64, dx: f64) -> Mat2 {
    let theta = q.sqrt() * dx;
    let c = theta.cos();
    let s = sinc(theta) * dx;
    [[c, s], [-q * s, c]]
}

/// Product of the segment propagators from the left edge to the right edge.
pub fn interior_propagator(v: &PiecewisePotential, k: Complex64) -> Mat2 {
    let energy = k * k;
    v.interior()
        .fold(IDENTITY, |acc, (l, r, value)| mul(&segment_propagator(energy - value, r - l), &acc))
}

/// Plane-wave transfer matrices.
///
/// `local` maps the left amplitudes of `e^{±ik(x − x_0)}` to the right amplitudes of
/// `e^{±ik(x − x_n)}`; `global` maps `(I, L)` to `(S, N)` for waves referenced to the
/// origin, `u_< = I e^{ikx} + L e^{−ikx}` and `u_> = S e^{ikx} + N e^{−ikx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub local: Mat2,
    pub global: Mat2,
}

fn check_k(k: Complex64) -> Result<(), ScatteringError> {
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(ScatteringError::NonFiniteWavenumber);
    }
    if 2.0 * k.norm() < SINGULAR {
        return Err(ScatteringError::SingularMatching { k, modulus: 2.0 * k.norm() });
    }
    Ok(())
}

fn local_from_propagator(p: &Mat2, k: Complex64) -> Mat2 {
    let ik = Complex64::i() * k;
    let i_over_k = Complex64::i() / k;
    [
        [
            0.5 * (p[0][0] + p[1][1] + ik * p[0][1] - i_over_k * p[1][0]),
            0.5 * (p[0][0] - p[1][1] - ik * p[0][1] - i_over_k * p[1][0]),
        ],
        [
            0.5 * (p[0][0] - p[1][1] + ik * p[0][1] + i_over_k * p[1][0]),
            0.5 * (p[0][0] + p[1][1] - ik * p[0][1] + i_over_k * p[1][0]),
        ],
    ]
}

pub fn transfer_matrix(v: &PiecewisePotential, k: Complex64) -> Result<TransferMatrix, ScatteringError> {
    check_k(k)?;
    let local = local_from_propagator(&interior_propagator(v, k), k);
    let (x0, xn) = (v.left_edge(), v.right_edge());
    let phase = |s: f64| (Complex64::i() * k * s).exp();
    let global = [
        [local[0][0] * phase(x0 - xn), local[0][1] * phase(-(x0 + xn))],
        [local[1][0] * phase(x0 + xn), local[1][1] * phase(xn - x0)],
    ];
    Ok(TransferMatrix { local, global })
}

/// Jost function referenced to the edges of the interaction region. Same zeros as
/// [`jost_denominator`] without the `e^{ik(x_n − x_0)}` factor, so it stays bounded
/// deep in the lower half plane.
pub fn local_jost(v: &PiecewisePotential, k: Complex64) -> Complex64 {
    let p = interior_propagator(v, k);
    let ik = Complex64::i() * k;
    0.5 * (p[0][0] + p[1][1] - ik * p[0][1] + Complex64::i() / k * p[1][0])
}

/// `M_22` of the global transfer matrix: identically 1 for the free particle, zero
/// exactly where a purely outgoing solution exists.
pub fn jost_denominator(v: &PiecewisePotential, k: Complex64) -> Result<Complex64, ScatteringError> {
    Ok(transfer_matrix(v, k)?.global[1][1])
}

/// Determinant of the 2×2 S-matrix, `M_11 / M_22 = jost(−k) / jost(k)`. Vanishes at the
/// mirror images `k̄` of the poles.
pub fn s_matrix_determinant(v: &PiecewisePotential, k: Complex64) -> Result<Complex64, ScatteringError> {
    let m = transfer_matrix(v, k)?.global;
    if m[1][1].norm() < SINGULAR {
        return Err(ScatteringError::SingularMatching { k, modulus: m[1][1].norm() });
    }
    Ok(m[0][0] / m[1][1])
}

/// Coefficients of a left-incidence solution, `I = 1`, `N = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub k: Complex64,
    /// `I`, amplitude of `e^{ikx}` on the left.
    pub incident: Complex64,
    /// `L`, amplitude of `e^{−ikx}` on the left.
    pub reflected: Complex64,
    /// `N`, amplitude of `e^{−ikx}` on the right.
    pub incident_right: Complex64,
    /// `S`, amplitude of `e^{ikx}` on the right.
    pub transmitted: Complex64,
    #[serde(skip)]
    pub transfer: Option<TransferMatrix>,
}

impl ScatteringSolution {
    pub fn transmission(&self) -> f64 {
        (self.transmitted / self.incident).norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        (self.reflected / self.incident).norm_sqr()
    }
}

pub fn solve_scattering(v: &PiecewisePotential, k: Complex64) -> Result<ScatteringSolution, ScatteringError> {
    let t = transfer_matrix(v, k)?;
    let m = t.global;
    if m[1][1].norm() < SINGULAR {
        return Err(ScatteringError::SingularMatching { k, modulus: m[1][1].norm() });
    }
    let incident = Complex64::new(1.0, 0.0);
    let reflected = -m[1][0] / m[1][1];
    let transmitted = m[0][0] + m[0][1] * reflected;
    Ok(ScatteringSolution {
        k,
        incident,
        reflected,
        incident_right: Complex64::default(),
        transmitted,
        transfer: Some(t),
    })
}

/// `T(E) = |S|²` at `k = √E`.
pub fn transmission(v: &PiecewisePotential, energy: f64) -> Result<f64, ScatteringError> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(ScatteringError::NonPositiveEnergy(energy));
    }
    Ok(solve_scattering(v, Complex64::new(energy.sqrt(), 0.0))?.transmission())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_particle_is_transparent() {
        let v = PiecewisePotential::new(vec![-1.0, 2.0], vec![0.0, 0.0, 0.0]).unwrap();
        for k in [c(0.3, 0.0), c(2.0, -0.5), c(1.0, 1.0)] {
            let s = solve_scattering(&v, k).unwrap();
            assert!((s.transmitted - 1.0).norm() < 1e-13);
            assert!(s.reflected.norm() < 1e-13);
            assert!((jost_denominator(&v, k).unwrap() - 1.0).norm() < 1e-13);
        }
        let free = PiecewisePotential::free();
        assert_eq!(jost_denominator(&free, c(0.7, 0.2)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn zero_wavenumber_is_singular() {
        let v = PiecewisePotential::fig5_well();
        assert!(matches!(solve_scattering(&v, c(0.0, 0.0)), Err(ScatteringError::SingularMatching { .. })));
    }

    #[test]
    fn propagator_has_unit_determinant() {
        for q in [c(4.0, 0.0), c(-9.0, 0.0), c(1e-12, 0.0), c(3.0, -2.0)] {
            let p = segment_propagator(q, 1.7);
            let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
            let scale = p.iter().flatten().fold(1.0f64, |m, z| m.max(z.norm()));
            assert!((det - 1.0).norm() < 1e-14 * scale * scale, "{q}: {det}");
        }
    }

    #[test]
    fn conjugation_and_reflection_symmetry() {
        let v = PiecewisePotential::new(vec![-2.0, 0.5, 1.0], vec![0.0, -3.0, 2.0, 0.0]).unwrap();
        let k = c(1.3, -0.4);
        let m = transfer_matrix(&v, k).unwrap().global;
        let mc = transfer_matrix(&v, -k.conj()).unwrap().global;
        let mm = transfer_matrix(&v, -k).unwrap().global;
        for i in 0..2 {
            for j in 0..2 {
                assert!((mc[i][j] - m[i][j].conj()).norm() < 1e-12);
            }
        }
        assert!((mm[1][1] - m[0][0]).norm() < 1e-12);
    }

    #[test]
    fn high_energy_transparency() {
        let v = PiecewisePotential::fig5_well();
        assert!(transmission(&v, 1e4 * v.max_abs_value()).unwrap() > 0.999);
    }

    proptest! {
        #[test]
        fn unitarity_for_real_energies(energy in 1e-3f64..3000.0) {
            let v = PiecewisePotential::new(vec![-3.0, -1.0, 2.5], vec![0.0, 5.0, -40.0, 0.0]).unwrap();
            let s = solve_scattering(&v, Complex64::new(energy.sqrt(), 0.0)).unwrap();
            prop_assert!((s.transmission() + s.reflection() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn splitting_a_segment_changes_nothing(x in -2.9f64..2.4, re in 0.1f64..6.0, im in -1.0f64..1.0) {
            let v = PiecewisePotential::new(vec![-3.0, -1.0, 2.5], vec![0.0, 5.0, -40.0, 0.0]).unwrap();
            let split = v.split_at(x).unwrap();
            let k = Complex64::new(re, im);
            let a = transfer_matrix(&v, k).unwrap().global;
            let b = transfer_matrix(&split, k).unwrap().global;
            let scale = a.iter().flatten().fold(1.0f64, |m, z| m.max(z.norm()));
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((a[i][j] - b[i][j]).norm() < 1e-12 * scale);
                }
            }
        }
    }
}
