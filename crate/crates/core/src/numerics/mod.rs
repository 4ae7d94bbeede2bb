//! Shared numerical kernels: complex Newton iteration with deflation, adaptive
//! Gauss-Kronrod quadrature, a dense non-Hermitian eigensolver and a targeted
//! eigenvalue refiner for tridiagonal operators.

mod eigen;
mod quadrature;
mod roots;
mod tridiag;

pub use eigen::{eig_dense, eigenvalues_dense, EigenPair};
pub use quadrature::{
    integrate_adaptive, integrate_real_line, integrate_semi_infinite, QuadResult,
};
pub use roots::{
    central_derivative, find_root_deflated, find_root_newton, scan_local_minima, RootReport,
};
pub use tridiag::Tridiagonal;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type ComplexValue = Complex64;

/// Stopping criteria shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Accept a root once `|f(z)|` drops below this.
    pub root_tol: f64,
    /// Newton steps smaller than this (relative to `max(1, |z|)`) count as stalled.
    pub step_tol: f64,
    /// Relative accuracy requested from quadrature.
    pub quad_tol: f64,
    /// Eigenpair residual bound, relative to `max(1, ‖M‖)`.
    pub eig_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            step_tol: 1e-13,
            quad_tol: 1e-10,
            eig_tol: 1e-10,
            max_iter: 100,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), NumericsError> {
        let all_positive = [self.root_tol, self.step_tol, self.quad_tol, self.eig_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !all_positive || self.max_iter == 0 {
            return Err(NumericsError::InvalidTolerances(*self));
        }
        Ok(())
    }

    pub fn with_root_tol(mut self, root_tol: f64) -> Self {
        self.root_tol = root_tol;
        self
    }

    pub fn with_quad_tol(mut self, quad_tol: f64) -> Self {
        self.quad_tol = quad_tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("derivative vanishes at z = {z} (|f| = {residual:e})")]
    DerivativeVanishes { z: Complex64, residual: f64 },
    #[error("quadrature tolerance not reached: estimate {estimate}, error {error:e}")]
    TolNotReached { estimate: Complex64, error: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid tolerances: {0:?}")]
    InvalidTolerances(Tolerances),
}
