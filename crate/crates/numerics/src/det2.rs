//! Regularized Fredholm determinant `det₂(I + R₀(z)u)` of the Birman–Schwinger operator,
//! discretized by Nyström's method on the trapezoid rule.
//!
//! The kernel `(i/2z) e^{iz|x−y|} u(y)` is symmetrized as `√u(x) G(x−y) √u(y)`. The
//! logarithm is accumulated from the pivots of an LU factorization so no determinant is
//! ever formed, and two resolutions are combined by Richardson extrapolation in `h²`.

use crate::error::{NumericsError, Result};
use crate::grid::{Geometry, GridFunction, C64};
use crate::scattering::SpectralPoint;
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Det2Value {
    /// Extrapolated `log det₂`.
    pub log_det2: C64,
    /// Value at the finer resolution alone.
    pub fine: C64,
    /// Value at the coarser resolution alone.
    pub coarse: C64,
    /// `|fine − extrapolated|`, a conservative error estimate.
    pub error_estimate: f64,
}

/// Largest admissible change between the two resolutions before extrapolation.
pub const CONVERGENCE_TOL: f64 = 1e-3;

fn green(z: C64, d: f64) -> C64 {
    C64::new(0.0, 0.5) / z * (C64::new(0.0, 1.0) * z * d.abs()).exp()
}

/// Nyström matrix `A` (so that the operator is `I + A`) and `tr A`.
fn nystrom(u: &GridFunction, z: C64) -> (Vec<C64>, usize, C64) {
    let n = u.len();
    let h = u.dx();
    let xs = u.xs();
    let s: Vec<C64> = (0..n)
        .map(|j| {
            let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
            (u.samples()[j] * w).sqrt()
        })
        .collect();
    let mut a = vec![C64::default(); n * n];
    let mut trace = C64::default();
    for j in 0..n {
        for k in 0..n {
            a[j * n + k] = s[j] * s[k] * green(z, xs[j] - xs[k]);
        }
        trace += a[j * n + j];
    }
    (a, n, trace)
}

/// `log det(I + A)` for a row-major `n × n` matrix `A`, by LU with partial pivoting. The
/// branch is the sum of principal logarithms of the pivots.
pub fn log_det_identity_plus(mut a: Vec<C64>, n: usize) -> Result<C64> {
    for j in 0..n {
        a[j * n + j] += 1.0;
    }
    let mut log = C64::default();
    for col in 0..n {
        let (p, pmax) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 {
            return Err(NumericsError::EigenvalueAtMinusOne);
        }
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
            }
            log += C64::new(0.0, std::f64::consts::PI);
        }
        let piv = a[col * n + col];
        log += piv.ln();
        let (top, rest) = a.split_at_mut((col + 1) * n);
        let prow = &top[col * n..];
        for r in 0..n - col - 1 {
            let row = &mut rest[r * n..(r + 1) * n];
            let f = row[col] / piv;
            if f != C64::default() {
                for k in col + 1..n {
                    row[k] -= f * prow[k];
                }
            }
        }
    }
    // the pivots of I + A for small A cluster near 1; wrap to the principal sheet
    let two_pi = 2.0 * std::f64::consts::PI;
    log.im -= two_pi * (log.im / two_pi).round();
    Ok(log)
}

fn log_det2_at(u: &GridFunction, z: C64) -> Result<C64> {
    let (a, n, trace) = nystrom(u, z);
    Ok(log_det_identity_plus(a, n)? - trace)
}

/// `log det₂` of `I + R₀(z)u` for `u` on a line interval, extrapolated from `n_fine` and
/// `n_fine / 2` nodes on the same interval.
pub fn fredholm_log_det2(u: &GridFunction, z: SpectralPoint, n_fine: usize) -> Result<Det2Value> {
    let Geometry::Line { a, b } = u.geometry() else {
        return Err(NumericsError::PeriodicRejected);
    };
    if n_fine < 32 {
        return Err(NumericsError::GridTooSmall(n_fine));
    }
    let ip = u.interpolant();
    let g = Geometry::Line { a, b };
    let fine_u = if u.len() == n_fine { u.clone() } else { GridFunction::from_fn(g, n_fine, |x| ip.eval(x))? };
    let n_coarse = n_fine / 2;
    let coarse_u = GridFunction::from_fn(g, n_coarse, |x| ip.eval(x))?;
    let fine = log_det2_at(&fine_u, z.z)?;
    let coarse = log_det2_at(&coarse_u, z.z)?;
    let r = coarse_u.dx() / fine_u.dx();
    let extrapolated = (r * r * fine - coarse) / (r * r - 1.0);
    if !((fine - coarse).norm() <= CONVERGENCE_TOL * extrapolated.norm().max(1.0)) {
        return Err(NumericsError::ConvergenceNotReached(format!(
            "log det₂ changes by {:.3e} between {n_coarse} and {n_fine} nodes",
            (fine - coarse).norm()
        )));
    }
    Ok(Det2Value { log_det2: extrapolated, fine, coarse, error_estimate: (fine - extrapolated).norm() })
}

/// `log det₂` computed from the eigenvalues of the Nyström matrix at its native resolution.
/// Intended as an independent check on small grids.
pub fn log_det2_by_eigenvalues(u: &GridFunction, z: SpectralPoint) -> Result<C64> {
    if u.is_periodic() {
        return Err(NumericsError::PeriodicRejected);
    }
    let (a, n, trace) = nystrom(u, z.z);
    let m = DMatrix::from_row_slice(n, n, &a);
    let eig = m
        .schur()
        .eigenvalues()
        .ok_or_else(|| NumericsError::ConvergenceNotReached("Schur form is not triangular".into()))?;
    let mut log = C64::default();
    for l in eig.iter() {
        let f = 1.0 + l;
        if f.norm() < 1e-14 {
            return Err(NumericsError::EigenvalueAtMinusOne);
        }
        log += f.ln();
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    log -= trace;
    log.im -= two_pi * (log.im / two_pi).round();
    Ok(log)
}

/// Raw `log det₂` at the native resolution of `u` (no extrapolation).
pub fn log_det2_native(u: &GridFunction, z: SpectralPoint) -> Result<C64> {
    if u.is_periodic() {
        return Err(NumericsError::PeriodicRejected);
    }
    log_det2_at(u, z.z)
}

/// `tr R₀(z)u` of the Nyström matrix, the term removed by the regularization.
pub fn kernel_trace(u: &GridFunction, z: SpectralPoint) -> Result<C64> {
    if u.is_periodic() {
        return Err(NumericsError::PeriodicRejected);
    }
    Ok(nystrom(u, z.z).2)
}
