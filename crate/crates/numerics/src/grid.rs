//! Uniformly sampled fields on a periodic interval or a truncated line.
//!
//! Periodic grids use `x_j = j·P/n` and spectral calculus. Line grids include both
//! endpoints, `x_j = a + j(b−a)/(n−1)`, and use tenth-order central differences with
//! zero extension beyond the ends; this is consistent because line data must decay below a
//! declared tail tolerance.

use crate::error::{NumericsError, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub type C64 = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Periodic { period: f64 },
    Line { a: f64, b: f64 },
}

/// Default tail tolerance for line potentials.
pub const TAIL_TOL: f64 = 1e-12;

/// Tenth-order central weights for the first derivative, offsets 1..=5.
const FD10: [f64; 5] = [5.0 / 6.0, -5.0 / 21.0, 5.0 / 84.0, -5.0 / 504.0, 1.0 / 1260.0];

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    samples: Vec<C64>,
    geometry: Geometry,
}

impl GridFunction {
    pub fn new(geometry: Geometry, samples: Vec<C64>) -> Result<Self> {
        if samples.len() < 16 {
            return Err(NumericsError::GridTooSmall(samples.len()));
        }
        match geometry {
            Geometry::Periodic { period } if !(period > 0.0) => {
                return Err(NumericsError::Invalid(format!("period {period}")))
            }
            Geometry::Line { a, b } if !(b > a) => return Err(NumericsError::Invalid(format!("interval [{a}, {b}]"))),
            _ => {}
        }
        Ok(GridFunction { samples, geometry })
    }

    pub fn from_fn(geometry: Geometry, n: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        let xs = nodes(geometry, n);
        Self::new(geometry, xs.iter().map(|&x| f(x)).collect())
    }

    pub fn from_real_fn(geometry: Geometry, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(geometry, n, |x| C64::new(f(x), 0.0))
    }

    pub fn zeros(geometry: Geometry, n: usize) -> Result<Self> {
        Self::new(geometry, vec![C64::new(0.0, 0.0); n])
    }

    pub fn constant(geometry: Geometry, n: usize, c: C64) -> Result<Self> {
        Self::new(geometry, vec![c; n])
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<C64>) -> GridFunction {
        assert_eq!(samples.len(), self.samples.len(), "sample count changed");
        GridFunction { samples, geometry: self.geometry }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.geometry, Geometry::Periodic { .. })
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn dx(&self) -> f64 {
        spacing(self.geometry, self.len())
    }

    pub fn x(&self, j: usize) -> f64 {
        node(self.geometry, self.len(), j)
    }

    pub fn xs(&self) -> Vec<f64> {
        nodes(self.geometry, self.len())
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.geometry == other.geometry && self.len() == other.len()
    }

    pub fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(NumericsError::GridMismatch(format!(
                "{:?}/{} vs {:?}/{}",
                self.geometry,
                self.len(),
                other.geometry,
                other.len()
            )))
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> GridFunction {
        self.with_samples(self.samples.iter().map(|&c| f(c)).collect())
    }

    pub fn map_indexed(&self, f: impl Fn(usize, f64, C64) -> C64) -> GridFunction {
        let xs = self.xs();
        self.with_samples(self.samples.iter().enumerate().map(|(j, &c)| f(j, xs[j], c)).collect())
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(C64, C64) -> C64) -> Result<GridFunction> {
        self.ensure_same_grid(other)?;
        Ok(self.with_samples(self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect()))
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        self.map(|x| x * c)
    }

    /// Integral over the grid: rectangle rule on periodic grids (spectrally accurate),
    /// trapezoid on line grids.
    pub fn integral(&self) -> C64 {
        let h = self.dx();
        let s: C64 = self.samples.iter().sum();
        match self.geometry {
            Geometry::Periodic { .. } => s * h,
            Geometry::Line { .. } => (s - (self.samples[0] + self.samples[self.len() - 1]) * 0.5) * h,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.map(|c| C64::new(c.norm_sqr(), 0.0)).integral().re.sqrt()
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.ensure_same_grid(other)?;
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn min_re(&self) -> f64 {
        self.samples.iter().map(|c| c.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_im(&self) -> f64 {
        self.samples.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Checks that a line function is below `tol` at both ends.
    pub fn check_tail(&self, tol: f64) -> Result<()> {
        match self.geometry {
            Geometry::Periodic { .. } => Err(NumericsError::PeriodicRejected),
            Geometry::Line { .. } => {
                for (side, v) in [("left", self.samples[0].norm()), ("right", self.samples[self.len() - 1].norm())] {
                    if v > tol {
                        return Err(NumericsError::NonDecayingPotential { side, value: v, tol });
                    }
                }
                Ok(())
            }
        }
    }

    /// k-th x-derivative: spectral on periodic grids, tenth-order differences on lines.
    pub fn derivative(&self, k: usize) -> GridFunction {
        if k == 0 {
            return self.clone();
        }
        match self.geometry {
            Geometry::Periodic { period } => {
                let sp = Spectral::new(self.len(), period);
                self.with_samples(sp.derivative(&self.samples, k))
            }
            Geometry::Line { .. } => {
                let mut out = self.samples.clone();
                for _ in 0..k {
                    out = fd_derivative(&out, self.dx());
                }
                self.with_samples(out)
            }
        }
    }

    /// Local tenth-order interpolant for evaluation between nodes.
    pub fn interpolant(&self) -> Interpolant<'_> {
        Interpolant::new(self)
    }

    /// Resamples a line function onto `n` nodes of the same interval.
    pub fn resample(&self, n: usize) -> Result<GridFunction> {
        let ip = self.interpolant();
        GridFunction::from_fn(self.geometry, n, |x| ip.eval(x))
    }
}

pub fn spacing(g: Geometry, n: usize) -> f64 {
    match g {
        Geometry::Periodic { period } => period / n as f64,
        Geometry::Line { a, b } => (b - a) / (n as f64 - 1.0),
    }
}

pub fn node(g: Geometry, n: usize, j: usize) -> f64 {
    match g {
        Geometry::Periodic { .. } => j as f64 * spacing(g, n),
        Geometry::Line { a, .. } => a + j as f64 * spacing(g, n),
    }
}

pub fn nodes(g: Geometry, n: usize) -> Vec<f64> {
    (0..n).map(|j| node(g, n, j)).collect()
}

fn fd_derivative(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    let w = FD_WINDOW;
    if n < w {
        return vec![C64::new(0.0, 0.0); n];
    }
    (0..n)
        .map(|j| {
            if j >= w / 2 && j + w / 2 < n {
                let mut acc = C64::new(0.0, 0.0);
                for (m, c) in FD10.iter().enumerate() {
                    acc += (f[j + m + 1] - f[j - m - 1]) * *c;
                }
                return acc / h;
            }
            // one-sided stencil on the nearest full window
            let start = j.saturating_sub(w / 2).min(n - w);
            let c = fornberg_first(j - start);
            (0..w).map(|m| f[start + m] * c[m]).sum::<C64>() / h
        })
        .collect()
}

const FD_WINDOW: usize = 11;

/// First-derivative weights at node `p` of the integer nodes `0..FD_WINDOW` (Fornberg).
fn fornberg_first(p: usize) -> [f64; FD_WINDOW] {
    let x0 = p as f64;
    let mut c = [[0.0f64; 2]; FD_WINDOW];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = -x0;
    for i in 1..FD_WINDOW {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = i as f64 - x0;
        for j in 0..i {
            let c3 = i as f64 - j as f64;
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    let mut out = [0.0; FD_WINDOW];
    for (o, row) in out.iter_mut().zip(&c) {
        *o = row[1];
    }
    out
}

/// FFT plans and wavenumbers for one periodic grid.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    period: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    xi: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spectral(n = {}, period = {})", self.n, self.period)
    }
}

impl Spectral {
    pub fn new(n: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        let xi = (0..n)
            .map(|k| {
                let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                2.0 * PI * m / period
            })
            .collect();
        Spectral { n, period, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), xi }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    pub fn forward(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse transform including the 1/n normalization.
    pub fn inverse(&self, fh: &[C64]) -> Vec<C64> {
        let mut buf = fh.to_vec();
        self.inv.process(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= s);
        buf
    }

    /// Symbol of ∂^k, with the Nyquist mode dropped for odd k.
    pub fn derivative_symbol(&self, k: usize) -> Vec<C64> {
        self.xi
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                if k % 2 == 1 && self.n % 2 == 0 && j == self.n / 2 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(0.0, x).powu(k as u32)
                }
            })
            .collect()
    }

    pub fn derivative(&self, f: &[C64], k: usize) -> Vec<C64> {
        let sym = self.derivative_symbol(k);
        let fh = self.forward(f);
        self.inverse(&fh.iter().zip(&sym).map(|(a, s)| a * s).collect::<Vec<_>>())
    }

    /// Applies a Fourier multiplier.
    pub fn apply(&self, f: &[C64], symbol: impl Fn(f64) -> C64) -> Vec<C64> {
        let fh = self.forward(f);
        self.inverse(&fh.iter().zip(&self.xi).map(|(a, &x)| a * symbol(x)).collect::<Vec<_>>())
    }

    /// Zero-pads a spectrum from this grid to `m ≥ n` modes (values rescaled for the
    /// unnormalized forward transform).
    pub fn pad(&self, fh: &[C64], m: usize) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); m];
        let half = n / 2;
        for k in 0..n {
            if n % 2 == 0 && k == half {
                continue;
            }
            let dst = if k < half || (n % 2 == 1 && k == half) { k } else { m - (n - k) };
            out[dst] = fh[k] * (m as f64 / n as f64);
        }
        out
    }

    /// Inverse of [`Self::pad`]: keeps the lowest `n` modes of an `m`-mode spectrum.
    pub fn truncate(&self, gh: &[C64]) -> Vec<C64> {
        let n = self.n;
        let m = gh.len();
        let half = n / 2;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            if n % 2 == 0 && k == half {
                continue;
            }
            let src = if k < half || (n % 2 == 1 && k == half) { k } else { m - (n - k) };
            out[k] = gh[src] * (n as f64 / m as f64);
        }
        out
    }
}

const STENCIL: usize = 10;

/// Barycentric Lagrange interpolation on a sliding window of ten nodes.
#[derive(Clone, Debug)]
pub struct Interpolant<'a> {
    samples: &'a [C64],
    x0: f64,
    h: f64,
    periodic: bool,
    weights: [f64; STENCIL],
}

impl<'a> Interpolant<'a> {
    pub fn new(f: &'a GridFunction) -> Self {
        let mut weights = [0.0; STENCIL];
        let mut binom = 1.0;
        for (j, w) in weights.iter_mut().enumerate() {
            *w = if j % 2 == 0 { binom } else { -binom };
            binom = binom * (STENCIL - 1 - j) as f64 / (j + 1) as f64;
        }
        Interpolant { samples: f.samples(), x0: f.x(0), h: f.dx(), periodic: f.is_periodic(), weights }
    }

    fn sample(&self, j: isize) -> C64 {
        let n = self.samples.len() as isize;
        if self.periodic {
            self.samples[j.rem_euclid(n) as usize]
        } else {
            self.samples[j.clamp(0, n - 1) as usize]
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        let t = (x - self.x0) / self.h;
        let base = t.floor();
        let frac = t - base;
        let i = base as isize;
        if frac == 0.0 {
            return self.sample(i);
        }
        let mut start = i - (STENCIL as isize / 2 - 1);
        if !self.periodic {
            // one-sided windows near the ends of a line
            start = start.clamp(0, (self.samples.len() - STENCIL) as isize);
        }
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for m in 0..STENCIL {
            let d = t - (start + m as isize) as f64;
            let c = self.weights[m] / d;
            num += self.sample(start + m as isize) * c;
            den += c;
        }
        num / den
    }
}
