//! Periodic versions of the first-order solves used by the flow diagnostics.
//!
//! On a periodic box the line Green's functions are replaced by the unique periodic
//! solutions, obtained by fixed-point iteration around a constant-coefficient operator that
//! is inverted exactly in Fourier space.

use crate::error::{NumericsError, Result};
use crate::grid::{Geometry, GridFunction, Spectral, C64};

const MAX_ITER: usize = 500;
const TOL: f64 = 1e-14;

fn spectral_of(f: &GridFunction) -> Result<Spectral> {
    match f.geometry() {
        Geometry::Periodic { period } => Ok(Spectral::new(f.len(), period)),
        Geometry::Line { .. } => Err(NumericsError::Invalid("periodic solve on a line grid".into())),
    }
}

fn mean(f: &[C64]) -> C64 {
    f.iter().sum::<C64>() / f.len() as f64
}

/// Periodic solution of `σ y′ + a(x) y = f` with `σ = ±1`, by the iteration
/// `y ← (σ∂ + ā)⁻¹ (f − (a − ā) y)`. Converges when `sup|a − ā| < |ā|`.
pub fn first_order_solve(sigma: f64, a: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
    a.ensure_same_grid(f)?;
    let sp = spectral_of(a)?;
    let abar = mean(a.samples());
    let da: Vec<C64> = a.samples().iter().map(|c| c - abar).collect();
    let symbol: Vec<C64> = sp.wavenumbers().iter().map(|&x| 1.0 / (C64::new(0.0, sigma * x) + abar)).collect();
    let apply = |g: &[C64]| -> Vec<C64> {
        let gh = sp.forward(g);
        sp.inverse(&gh.iter().zip(&symbol).map(|(a, s)| a * s).collect::<Vec<_>>())
    };
    let mut y = apply(f.samples());
    let scale = f.sup_norm().max(1e-300);
    for _ in 0..MAX_ITER {
        let rhs: Vec<C64> = (0..y.len()).map(|j| f.samples()[j] - da[j] * y[j]).collect();
        let next = apply(&rhs);
        let change = next.iter().zip(&y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        y = next;
        if change <= TOL * scale.max(y.iter().map(|c| c.norm()).fold(0.0, f64::max)) {
            return Ok(f.with_samples(y));
        }
    }
    Err(NumericsError::PeriodicSolve(format!(
        "first-order solve stalled (sup|a − ā| = {:.3e}, |ā| = {:.3e})",
        da.iter().map(|c| c.norm()).fold(0.0, f64::max),
        abar.norm()
    )))
}

/// Periodic `β` with `−β′ + 2τβ + 2wβ = f`.
pub fn green_solve(w: &GridFunction, f: &GridFunction, tau: f64) -> Result<GridFunction> {
    let a = w.map(|c| 2.0 * tau + 2.0 * c);
    first_order_solve(-1.0, &a, f)
}

/// Periodic good variable `v = 1/(2τβ) − 1` with `(−∂ + 2τ + 2w)β = 1`.
pub fn good_variable(w: &GridFunction, tau: f64) -> Result<GridFunction> {
    let one = w.map(|_| C64::new(1.0, 0.0));
    let beta = green_solve(w, &one, tau)?;
    let v = beta.map(|b| 1.0 / (2.0 * tau * b) - 1.0);
    let min = v.samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(NumericsError::SingularS(min));
    }
    Ok(v)
}

/// Periodic solution of `r′ + 2τr + r² = source` near `(∂ + 2τ)⁻¹ source`, by Newton's method.
pub fn riccati(source: &GridFunction, tau: f64) -> Result<GridFunction> {
    let sp = spectral_of(source)?;
    let init = sp.apply(source.samples(), |x| 1.0 / C64::new(2.0 * tau, x));
    let mut r = source.with_samples(init);
    let scale = source.sup_norm().max(1e-300);
    for _ in 0..60 {
        let dr = r.derivative(1);
        let g: Vec<C64> = (0..r.len())
            .map(|j| source.samples()[j] - dr.samples()[j] - 2.0 * tau * r.samples()[j] - r.samples()[j] * r.samples()[j])
            .collect();
        let res = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if res <= 1e-13 * scale.max(1.0) {
            return Ok(r);
        }
        let a = r.map(|c| 2.0 * tau + 2.0 * c);
        let delta = first_order_solve(1.0, &a, &source.with_samples(g))?;
        r = r.zip_with(&delta, |a, b| a + b)?;
    }
    Err(NumericsError::PeriodicSolve("Riccati Newton iteration did not converge".into()))
}

/// `𝒯₋₁^{Gardner}(iτ₁, w, τ₀) = ½(4τ₀² − 4τ₁²)⁻¹ ∫ (w² − w(iτ₁)²)` with the periodic `w(iτ₁)`.
pub fn gardner_generating(w: &GridFunction, tau0: f64, tau1: f64) -> Result<f64> {
    let denom = 4.0 * tau0 * tau0 - 4.0 * tau1 * tau1;
    if denom.abs() < 1e-12 {
        return Err(NumericsError::Invalid("τ₁ must differ from τ₀".into()));
    }
    let u = crate::scattering::miura_forward(w, tau0);
    let wz = riccati(&u, tau1)?;
    let integrand = w.zip_with(&wz, |a, b| a * a - b * b)?;
    Ok(0.5 * integrand.integral().re / denom)
}
