//! Pseudospectral evolution of the KdV, Gardner, good-variable and τ-flows on a periodic
//! box with a fourth-order exponential time-differencing Runge–Kutta scheme.
//!
//! Every flow has the form `q_t = ∂ₓF(q)` with `F` generated symbolically. The exactly
//! integrated linear part is the constant-coefficient (Fourier-diagonal) part of the
//! linearization at the initial state; for zero data this is the leading
//! `(−1)^N ∂^{2N+1}` together with any lower linear terms. The remainder is evaluated
//! pointwise on a zero-padded grid large enough to remove aliasing for the polynomial degree.

use crate::density::density_samples;
use crate::error::{NumericsError, Result};
use crate::grid::{Geometry, GridFunction, Spectral, C64, TAIL_TOL};
use crate::ode::OdeOptions;
use crate::periodic;
use crate::scattering::{miura_forward, tau_flow_vf};
use hierarchylab_core::algebra::{partial_derivative, CompiledPoly, DiffPolynomial, Var};
use hierarchylab_core::hierarchy::{gardner_hamiltonians, good_variable_equation, lenard_sequence};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowFamily {
    Kdv,
    Gardner,
    GoodVariable,
    TauFlow,
}

impl FlowFamily {
    pub fn name(self) -> &'static str {
        match self {
            FlowFamily::Kdv => "kdv",
            FlowFamily::Gardner => "gardner",
            FlowFamily::GoodVariable => "goodvar",
            FlowFamily::TauFlow => "tau-flow",
        }
    }

    pub fn from_name(s: &str) -> Option<FlowFamily> {
        match s {
            "kdv" => Some(FlowFamily::Kdv),
            "gardner" => Some(FlowFamily::Gardner),
            "goodvar" | "good-variable" => Some(FlowFamily::GoodVariable),
            "tau-flow" | "tau" => Some(FlowFamily::TauFlow),
            _ => None,
        }
    }

    pub fn field(self) -> Var {
        match self {
            FlowFamily::Kdv | FlowFamily::TauFlow => Var::U,
            FlowFamily::Gardner => Var::W,
            FlowFamily::GoodVariable => Var::V,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Exponential time differencing RK4 (Cox–Matthews, contour-integral coefficients).
    Etdrk4,
}

/// Good-variable flows abort when `min(1+v)` drops below this.
pub const POSITIVITY_GUARD: f64 = 0.05;
/// Norm growth factor treated as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e6;
/// Largest admissible growth exponent `steps · max(|R| − 1)` of the frozen-coefficient
/// amplification factor.
pub const STABILITY_BUDGET: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub family: FlowFamily,
    pub n: usize,
    pub tau0: f64,
    pub tau: f64,
    pub grid: usize,
    pub period: f64,
    pub t_end: f64,
    pub dt: f64,
    pub integrator: Integrator,
    /// Snapshot every this many steps.
    pub sample_every: usize,
}

impl FlowSpec {
    pub fn new(family: FlowFamily, n: usize) -> Self {
        FlowSpec {
            family,
            n,
            tau0: 2.0,
            tau: 2.0,
            grid: 256,
            period: 2.0 * std::f64::consts::PI,
            t_end: 1.0,
            dt: 1e-4,
            integrator: Integrator::Etdrk4,
            sample_every: 100,
        }
    }

    pub fn geometry(&self) -> Geometry {
        Geometry::Periodic { period: self.period }
    }

    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }

    /// Step actually used: `t_end / steps`.
    pub fn effective_dt(&self) -> f64 {
        self.t_end / self.steps() as f64
    }

    fn check_basic(&self) -> Result<()> {
        if self.grid < 16 || self.grid % 2 != 0 {
            return Err(NumericsError::Invalid(format!("grid {} must be even and ≥ 16", self.grid)));
        }
        if !(self.period > 0.0 && self.t_end > 0.0 && self.dt > 0.0) || self.sample_every == 0 {
            return Err(NumericsError::Invalid("period, t_end, dt and sample_every must be positive".into()));
        }
        if self.family == FlowFamily::TauFlow && !(self.tau > 0.0) {
            return Err(NumericsError::Invalid("tau-flow needs tau > 0".into()));
        }
        Ok(())
    }
}

/// Symbolic right-hand side `F` with `q_t = ∂F(q)`.
pub fn flow_polynomial(family: FlowFamily, n: usize) -> Result<DiffPolynomial> {
    Ok(match family {
        FlowFamily::Kdv => lenard_sequence(n)?.gradients[n].clone(),
        FlowFamily::Gardner => gardner_hamiltonians(n)?.gradients[n].clone(),
        FlowFamily::GoodVariable => good_variable_equation(n, &lenard_sequence(n.max(1))?)?,
        FlowFamily::TauFlow => return Err(NumericsError::Invalid("the tau-flow is not polynomial".into())),
    })
}

/// `∂F/∂q^{(k)}` with `s = (1+v)⁻¹` differentiated through `∂s/∂v = −s²`.
fn jacobian_coefficients(f: &DiffPolynomial, var: Var) -> Vec<(u16, DiffPolynomial)> {
    let max = f.max_order().unwrap_or(0);
    let mut out = Vec::new();
    for k in 0..=max {
        let mut c = partial_derivative(f, var, k);
        if var == Var::V && k == 0 && f.occurring_vars().contains(&Var::S) {
            let ds = partial_derivative(f, Var::S, 0);
            let s2 = DiffPolynomial::var(Var::S).pow(2);
            c.sub_assign(&(&ds * &s2));
        }
        if !c.is_zero() {
            out.push((k, c));
        }
    }
    out
}

struct PolyRhs {
    compiled: CompiledPoly,
    /// Evolve `ℓ = log(1 + v)` instead of `v`.
    log_gauge: bool,
    sp: Spectral,
    pad: Spectral,
    ik: Vec<C64>,
}

enum Rhs {
    Poly(PolyRhs),
    Tau { tau: f64, opts: OdeOptions, geometry: Geometry },
}

/// Exponential integrator state for one flow.
pub struct Evolver {
    spec: FlowSpec,
    sp: Spectral,
    rhs: Rhs,
    linear: Vec<C64>,
    coeffs: Etd,
    /// Worst-case spurious growth exponent over the run predicted by the frozen-coefficient model.
    pub stiffness: f64,
}

struct Etd {
    e: Vec<C64>,
    e2: Vec<C64>,
    q: Vec<C64>,
    f1: Vec<C64>,
    f2: Vec<C64>,
    f3: Vec<C64>,
}

impl Etd {
    /// One-step amplification of mode `k` for the scalar model `q̂′ = (L + λ) q̂`.
    fn amplification(&self, k: usize, lam: C64) -> C64 {
        let a = self.e2[k] + self.q[k] * lam;
        let b = self.e2[k] + self.q[k] * lam * a;
        let c = self.e2[k] * a + self.q[k] * lam * (2.0 * b - 1.0);
        self.e[k] + lam * (self.f1[k] + 2.0 * (a + b) * self.f2[k] + c * self.f3[k])
    }

    /// Largest `|R| − |e^{hL}|` over explicit perturbations with rate `rate` that are
    /// dispersive or damping, i.e. spurious growth per step.
    fn growth_excess(&self, k: usize, rate: f64) -> f64 {
        [C64::new(0.0, rate), C64::new(0.0, -rate), C64::new(-rate, 0.0)]
            .iter()
            .map(|&lam| self.amplification(k, lam).norm() - self.e[k].norm())
            .fold(0.0, f64::max)
    }
}

fn etd_coefficients(linear: &[C64], h: f64) -> Etd {
    const M: usize = 64;
    let roots: Vec<C64> = (0..M)
        .map(|j| C64::from_polar(1.0, std::f64::consts::PI * (2.0 * j as f64 + 1.0) / M as f64))
        .collect();
    let mut etd = Etd { e: vec![], e2: vec![], q: vec![], f1: vec![], f2: vec![], f3: vec![] };
    for &l in linear {
        let lh = l * h;
        etd.e.push(lh.exp());
        etd.e2.push((lh * 0.5).exp());
        let (mut q, mut f1, mut f2, mut f3) = (C64::default(), C64::default(), C64::default(), C64::default());
        for r in &roots {
            let z = lh + r;
            let ez = z.exp();
            let z3 = z * z * z;
            q += ((z * 0.5).exp() - 1.0) / z;
            f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            f2 += (2.0 + z + ez * (z - 2.0)) / z3;
            f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        let s = h / M as f64;
        etd.q.push(q * s);
        etd.f1.push(f1 * s);
        etd.f2.push(f2 * s);
        etd.f3.push(f3 * s);
    }
    etd
}

impl PolyRhs {
    fn new(f: &DiffPolynomial, var: Var, sp: &Spectral, tau0: f64, log_gauge: bool) -> Result<Self> {
        let compiled = CompiledPoly::new(f, C64::new(0.0, 0.0), C64::new(tau0, 0.0));
        for &(v, k) in compiled.slots() {
            if v == Var::S && k > 0 {
                return Err(NumericsError::Invalid("derived s in a flow field".into()));
            }
            if v != var && v != Var::S {
                return Err(NumericsError::Invalid(format!("flow field depends on {v}")));
            }
        }
        let degree = f.max_homogeneity() as usize + if f.occurring_vars().contains(&Var::S) { 2 } else { 0 };
        let n = sp.len();
        let m = ((degree.max(1) + 1) * n).div_ceil(2).next_multiple_of(2).max(n);
        let ik = sp.derivative_symbol(1);
        Ok(PolyRhs { compiled, log_gauge, sp: sp.clone(), pad: Spectral::new(m, sp.period()), ik })
    }

    /// `F` at the padded nodes from the padded spectrum of the field.
    fn field_on_pad(&self, ph: &[C64], values: &[C64]) -> Vec<C64> {
        let cols: Vec<Vec<C64>> = self
            .compiled
            .slots()
            .iter()
            .map(|&(v, k)| {
                if v == Var::S {
                    values.iter().map(|c| 1.0 / (1.0 + c)).collect()
                } else if k == 0 {
                    values.to_vec()
                } else {
                    let sym = self.pad.derivative_symbol(k as usize);
                    self.pad.inverse(&ph.iter().zip(&sym).map(|(a, s)| a * s).collect::<Vec<_>>())
                }
            })
            .collect();
        let mut vals = vec![C64::default(); cols.len()];
        (0..values.len())
            .map(|j| {
                for (s, c) in vals.iter_mut().zip(&cols) {
                    *s = c[j];
                }
                self.compiled.eval(&vals)
            })
            .collect()
    }

    /// Spectrum of the right-hand side on the base grid: `∂F(q)`, or `(1+v)⁻¹ ∂F(v)` with
    /// `v = e^ℓ − 1` in the logarithmic gauge.
    fn eval(&self, qh: &[C64]) -> Vec<C64> {
        let m = self.pad.len();
        let qp = self.sp.pad(qh, m);
        if !self.log_gauge {
            let values = self.pad.inverse(&qp);
            let fh = self.pad.forward(&self.field_on_pad(&qp, &values));
            let fh = self.sp.truncate(&fh);
            return fh.iter().zip(&self.ik).map(|(a, s)| a * s).collect();
        }
        let ell = self.pad.inverse(&qp);
        let v: Vec<C64> = ell.iter().map(|l| l.exp() - 1.0).collect();
        let vh = self.pad.forward(&v);
        let fx = self.field_on_pad(&vh, &v);
        let dfx = self.pad.derivative(&fx, 1);
        let rhs: Vec<C64> = dfx.iter().zip(&ell).map(|(d, l)| d * (-l).exp()).collect();
        self.sp.truncate(&self.pad.forward(&rhs))
    }
}

impl std::fmt::Debug for Evolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Evolver").field("spec", &self.spec).field("stiffness", &self.stiffness).finish_non_exhaustive()
    }
}

impl Evolver {
    /// Builds the integrator for `spec` around the initial state `q0` and checks the
    /// stability budget.
    pub fn new(spec: &FlowSpec, q0: &GridFunction) -> Result<Self> {
        Self::with_budget(spec, q0, STABILITY_BUDGET)
    }

    /// As [`Evolver::new`] with an explicit stiffness budget.
    pub fn with_budget(spec: &FlowSpec, q0: &GridFunction, budget: f64) -> Result<Self> {
        spec.check_basic()?;
        if q0.geometry() != spec.geometry() || q0.len() != spec.grid {
            return Err(NumericsError::GridMismatch("initial data do not match the flow grid".into()));
        }
        let sp = Spectral::new(spec.grid, spec.period);
        let h = spec.effective_dt();
        let (rhs, linear, rho) = match spec.family {
            FlowFamily::TauFlow => {
                let opts = OdeOptions::default();
                let geometry = Geometry::Line { a: q0.x(0), b: q0.x(q0.len() - 1) };
                // ∂(−∂ + 2τ + 2w)⁻¹ is bounded by about one on every mode
                let rho = vec![1.0; spec.grid];
                (Rhs::Tau { tau: spec.tau, opts, geometry }, vec![C64::default(); spec.grid], rho)
            }
            fam => {
                let var = fam.field();
                let f = flow_polynomial(fam, spec.n)?;
                if fam == FlowFamily::GoodVariable {
                    let min = q0.samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min);
                    if !(min > POSITIVITY_GUARD) {
                        return Err(NumericsError::PositivityLost { t: 0.0, min });
                    }
                }
                let gauge = fam == FlowFamily::GoodVariable;
                let d = linear_coefficients(&f, var, q0, spec.tau0, gauge)?;
                let (linear, rho) = linearization(&d, &sp);
                (Rhs::Poly(PolyRhs::new(&f, var, &sp, spec.tau0, gauge)?), linear, rho)
            }
        };
        let coeffs = etd_coefficients(&linear, h);
        let nyquist = spec.grid / 2;
        let excess = (0..spec.grid)
            .filter(|&k| k != nyquist)
            .map(|k| coeffs.growth_excess(k, rho[k]))
            .fold(0.0, f64::max);
        let stiffness = excess * spec.steps() as f64;
        if !(stiffness <= budget) {
            return Err(NumericsError::StabilityViolation {
                dt: h,
                detail: format!(
                    "frozen-coefficient growth exponent {stiffness:.3e} over {} steps exceeds {budget}",
                    spec.steps()
                ),
            });
        }
        Ok(Evolver { spec: spec.clone(), sp, rhs, linear, coeffs, stiffness })
    }

    pub fn linear_symbol(&self) -> &[C64] {
        &self.linear
    }

    /// `∂F(q) − Lq` in Fourier space.
    fn nonlinear(&self, qh: &[C64]) -> Result<Vec<C64>> {
        let full = match &self.rhs {
            Rhs::Poly(p) => p.eval(qh),
            Rhs::Tau { tau, opts, geometry } => {
                let q = self.sp.inverse(qh);
                let u = GridFunction::new(*geometry, q)?;
                u.check_tail(TAIL_TOL.max(1e-10))?;
                let vf = tau_flow_vf(&u, *tau, opts)?;
                self.sp.forward(vf.vector_field.samples())
            }
        };
        Ok(full.iter().zip(qh).zip(&self.linear).map(|((f, q), l)| f - l * q).collect())
    }

    fn step(&self, v: &[C64]) -> Result<Vec<C64>> {
        let c = &self.coeffs;
        let n = v.len();
        let nv = self.nonlinear(v)?;
        let a: Vec<C64> = (0..n).map(|k| c.e2[k] * v[k] + c.q[k] * nv[k]).collect();
        let na = self.nonlinear(&a)?;
        let b: Vec<C64> = (0..n).map(|k| c.e2[k] * v[k] + c.q[k] * na[k]).collect();
        let nb = self.nonlinear(&b)?;
        let cc: Vec<C64> = (0..n).map(|k| c.e2[k] * a[k] + c.q[k] * (2.0 * nb[k] - nv[k])).collect();
        let nc = self.nonlinear(&cc)?;
        Ok((0..n)
            .map(|k| c.e[k] * v[k] + nv[k] * c.f1[k] + 2.0 * (na[k] + nb[k]) * c.f2[k] + nc[k] * c.f3[k])
            .collect())
    }

    fn log_gauge(&self) -> bool {
        matches!(&self.rhs, Rhs::Poly(p) if p.log_gauge)
    }

    fn to_state(&self, q: &[C64]) -> Vec<C64> {
        if self.log_gauge() {
            q.iter().map(|v| (1.0 + v).ln()).collect()
        } else {
            q.to_vec()
        }
    }

    fn from_state(&self, q: Vec<C64>) -> Vec<C64> {
        if self.log_gauge() {
            q.into_iter().map(|l| l.exp() - 1.0).collect()
        } else {
            q
        }
    }

    /// Runs to `t_end`, recording a snapshot every `sample_every` steps (and at the end).
    pub fn run(&self, q0: &GridFunction) -> Result<Trajectory> {
        let steps = self.spec.steps();
        let h = self.spec.effective_dt();
        let mut v = self.sp.forward(&self.to_state(q0.samples()));
        let norm = |x: &[C64]| x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let n0 = norm(&v);
        let mut traj = Trajectory { spec: self.spec.clone(), times: vec![0.0], snapshots: vec![q0.with_samples(self.from_state(self.sp.inverse(&v)))] };
        let mut last_good = 0.0;
        for s in 1..=steps {
            let t = s as f64 * h;
            v = self.step(&v)?;
            let ratio = norm(&v) / n0.max(1e-300);
            if !ratio.is_finite() || (n0 > 0.0 && ratio > BLOWUP_FACTOR) {
                return Err(NumericsError::BlowupDetected { t, ratio, last_good });
            }
            if s % self.spec.sample_every == 0 || s == steps {
                let q = q0.with_samples(self.from_state(self.sp.inverse(&v)));
                if self.spec.family == FlowFamily::GoodVariable {
                    let min = q.samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min);
                    if min < POSITIVITY_GUARD {
                        return Err(NumericsError::PositivityLost { t, min });
                    }
                }
                traj.times.push(t);
                traj.snapshots.push(q);
            }
            last_good = t;
        }
        Ok(traj)
    }
}

/// Coefficients `d_j` of the linearized right-hand side `Σ_j d_j ∂ʲ` at `q0`, either for
/// `q_t = ∂F(q)` or, in the logarithmic gauge, for `ℓ_t = (1+v)⁻¹ ∂F(v)`.
fn linear_coefficients(f: &DiffPolynomial, var: Var, q0: &GridFunction, tau0: f64, log_gauge: bool) -> Result<Vec<GridFunction>> {
    let jac = jacobian_coefficients(f, var);
    let top = jac.iter().map(|(k, _)| *k as usize).max().unwrap_or(0);
    let mut c = vec![GridFunction::zeros(q0.geometry(), q0.len())?; top + 1];
    for (k, p) in &jac {
        c[*k as usize] = density_samples(p, &[(var, q0)], C64::default(), C64::new(tau0, 0.0))?;
    }
    // q_t = ∂(Σ a_i ∂ⁱ δ) = Σ (a_j′ + a_{j−1}) ∂ʲ δ
    let outer = |a: &[GridFunction]| -> Result<Vec<GridFunction>> {
        let mut d = vec![GridFunction::zeros(q0.geometry(), q0.len())?; a.len() + 1];
        for (i, ai) in a.iter().enumerate() {
            d[i] = d[i].zip_with(&ai.derivative(1), |x, y| x + y)?;
            d[i + 1] = d[i + 1].zip_with(ai, |x, y| x + y)?;
        }
        Ok(d)
    };
    if !log_gauge {
        return outer(&c);
    }
    // δv = (1+v) δℓ, so Σ c_k ∂ᵏ δv = Σ_i A_i ∂ⁱ δℓ with A_i = Σ_k C(k,i) c_k (1+v)^{(k−i)}
    let one_plus = q0.map(|x| 1.0 + x);
    let jets: Vec<GridFunction> = (0..=top).map(|m| if m == 0 { one_plus.clone() } else { q0.derivative(m) }).collect();
    let mut a = vec![GridFunction::zeros(q0.geometry(), q0.len())?; top + 1];
    for (k, ck) in c.iter().enumerate() {
        let mut binom = 1.0;
        for i in 0..=k {
            if i > 0 {
                binom = binom * (k + 1 - i) as f64 / i as f64;
            }
            let term = ck.zip_with(&jets[k - i], |x, y| binom * x * y)?;
            a[i] = a[i].zip_with(&term, |x, y| x + y)?;
        }
    }
    let s = one_plus.map(|x| 1.0 / x);
    let dfx = density_samples(f, &[(var, q0)], C64::default(), C64::new(tau0, 0.0))?.derivative(1);
    let mut d = outer(&a)?;
    for dj in d.iter_mut() {
        *dj = dj.zip_with(&s, |x, y| x * y)?;
    }
    d[0] = d[0].zip_with(&s.zip_with(&dfx, |x, y| x * y)?, |x, y| x - y)?;
    Ok(d)
}

/// Mean-field dispersive symbol `i·Im Σ_j mean(d_j)(iξ)ʲ` and the bound
/// `ρ(ξ) = Σ_j sup|d_j − mean(d_j)| |ξ|ʲ` on what the explicit stages must carry.
fn linearization(d: &[GridFunction], sp: &Spectral) -> (Vec<C64>, Vec<f64>) {
    let mut symbol = vec![C64::default(); sp.len()];
    let mut rho = vec![0.0; sp.len()];
    for (j, dj) in d.iter().enumerate() {
        let mean = dj.samples().iter().sum::<C64>() / dj.len() as f64;
        let spread = dj.samples().iter().map(|x| (x - mean).norm()).fold(0.0, f64::max);
        let sym = sp.derivative_symbol(j);
        for (k, &xi) in sp.wavenumbers().iter().enumerate() {
            symbol[k] += mean * sym[k];
            rho[k] += spread * xi.abs().powi(j as i32);
        }
    }
    for s in symbol.iter_mut() {
        s.re = 0.0;
    }
    (symbol, rho)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub spec: FlowSpec,
    pub times: Vec<f64>,
    pub snapshots: Vec<GridFunction>,
}

impl Trajectory {
    /// Every `k`-th snapshot, starting with the first.
    pub fn every(&self, k: usize) -> Trajectory {
        let k = k.max(1);
        Trajectory {
            spec: self.spec.clone(),
            times: self.times.iter().step_by(k).copied().collect(),
            snapshots: self.snapshots.iter().step_by(k).cloned().collect(),
        }
    }

    pub fn last(&self) -> &GridFunction {
        self.snapshots.last().expect("a trajectory always holds its initial state")
    }
}

/// Evolves `initial` under `spec`.
pub fn evolve(spec: &FlowSpec, initial: &GridFunction) -> Result<Trajectory> {
    Evolver::new(spec, initial)?.run(initial)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub conserved: BTreeMap<String, Vec<C64>>,
    pub residuals: BTreeMap<String, Vec<f64>>,
}

impl DiagnosticsSeries {
    /// `max_t |H(t) − H(0)| / max(|H(0)|, 1)`.
    pub fn max_relative_drift(&self, name: &str) -> Option<f64> {
        let s = self.conserved.get(name)?;
        let h0 = s[0];
        let scale = h0.norm().max(1.0);
        Some(s.iter().map(|h| (h - h0).norm()).fold(0.0, f64::max) / scale)
    }

    pub fn max_residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).map(|r| r.iter().copied().fold(0.0, f64::max))
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.times.len();
        self.conserved.values().all(|v| v.len() == n) && self.residuals.values().all(|v| v.len() == n)
    }

    /// CSV with a `t` column followed by one column per series (real parts of conserved
    /// quantities, then residuals).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for k in self.conserved.keys() {
            out.push_str(&format!(",{k}"));
        }
        for k in self.residuals.keys() {
            out.push_str(&format!(",{k}"));
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{t:.12e}"));
            for v in self.conserved.values() {
                out.push_str(&format!(",{:.16e}", v[i].re));
            }
            for v in self.residuals.values() {
                out.push_str(&format!(",{:.6e}", v[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates each named density along the trajectory, plus `L2` = `∫|q|²`.
pub fn conservation_report(traj: &Trajectory, hamiltonians: &[(String, DiffPolynomial)]) -> Result<DiagnosticsSeries> {
    let var = traj.spec.family.field();
    let mut d = DiagnosticsSeries { times: traj.times.clone(), ..Default::default() };
    for (name, h) in hamiltonians {
        let vals = traj
            .snapshots
            .iter()
            .map(|q| Ok(density_samples(h, &[(var, q)], C64::default(), C64::new(traj.spec.tau0, 0.0))?.integral()))
            .collect::<Result<Vec<_>>>()?;
        d.conserved.insert(name.clone(), vals);
    }
    d.conserved.insert(
        "L2".into(),
        traj.snapshots.iter().map(|q| q.map(|c| C64::new(c.norm_sqr(), 0.0)).integral()).collect(),
    );
    Ok(d)
}

/// Gardner Hamiltonians `H_0..=H_m` as named densities.
pub fn gardner_hamiltonian_list(m: usize) -> Result<Vec<(String, DiffPolynomial)>> {
    let g = gardner_hamiltonians(m)?;
    Ok(g.hamiltonians.iter().enumerate().map(|(k, h)| (format!("H{k}"), h.density.clone())).collect())
}

/// Adds `T(iτⱼ)` samples of the periodic Gardner generating function to a Gardner report.
pub fn add_generating_samples(d: &mut DiagnosticsSeries, traj: &Trajectory, taus: &[f64]) -> Result<()> {
    for &t1 in taus {
        let vals = traj
            .snapshots
            .iter()
            .map(|w| Ok(C64::new(periodic::gardner_generating(w, traj.spec.tau0, t1)?, 0.0)))
            .collect::<Result<Vec<_>>>()?;
        d.conserved.insert(format!("T-1(i{t1})"), vals);
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Intertwining {
    pub series: DiagnosticsSeries,
    pub gardner: Trajectory,
    pub kdv: Trajectory,
    pub goodvar: Trajectory,
}

/// Evolves `w0` under Gardner-N, `M(τ₀, w0)` under KdV-N and `V(w0)` under the good-variable
/// N-flow, and records `sup|M(w(t)) − u(t)|`, `sup|V(w(t)) − v(t)|` and `min(1+v(t))`.
pub fn intertwining_check(spec: &FlowSpec, w0: &GridFunction, tau0: f64) -> Result<Intertwining> {
    let mut g = spec.clone();
    g.family = FlowFamily::Gardner;
    g.tau0 = tau0;
    let gardner = evolve(&g, w0)?;
    let mut k = g.clone();
    k.family = FlowFamily::Kdv;
    let kdv = evolve(&k, &miura_forward(w0, tau0))?;
    let mut gv = g.clone();
    gv.family = FlowFamily::GoodVariable;
    let goodvar = evolve(&gv, &periodic::good_variable(w0, tau0)?)?;
    let mut series = DiagnosticsSeries { times: gardner.times.clone(), ..Default::default() };
    let mut miura = Vec::new();
    let mut wmap = Vec::new();
    let mut positivity = Vec::new();
    for i in 0..gardner.times.len() {
        let w = &gardner.snapshots[i];
        miura.push(miura_forward(w, tau0).max_abs_diff(&kdv.snapshots[i])?);
        wmap.push(periodic::good_variable(w, tau0)?.max_abs_diff(&goodvar.snapshots[i])?);
        positivity.push(goodvar.snapshots[i].samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min));
    }
    series.residuals.insert("miura".into(), miura);
    series.residuals.insert("w_map".into(), wmap);
    series.residuals.insert("min_1_plus_v".into(), positivity);
    Ok(Intertwining { series, gardner, kdv, goodvar })
}

/// Compares `∂_t(w²)` (fourth-order central differences of snapshots) with `∂ₓ Fl(w)`;
/// the series is defined at interior snapshots and reports the L² mismatch and the mean of
/// `∂ₓ Fl` (zero on a periodic box).
pub fn flux_residual(traj: &Trajectory, flux: &DiffPolynomial) -> Result<DiagnosticsSeries> {
    let s = &traj.snapshots;
    if s.len() < 5 {
        return Err(NumericsError::Invalid("flux residual needs at least five snapshots".into()));
    }
    let dt = traj.times[1] - traj.times[0];
    let sq: Vec<GridFunction> = s.iter().map(|w| w.map(|c| c * c)).collect();
    let mut d = DiagnosticsSeries::default();
    let mut mismatch = Vec::new();
    let mut mean = Vec::new();
    for i in 2..s.len() - 2 {
        let fl = density_samples(flux, &[(Var::W, &s[i])], C64::default(), C64::new(traj.spec.tau0, 0.0))?;
        let dfl = fl.derivative(1);
        let dt_sq: Vec<C64> = (0..s[i].len())
            .map(|j| {
                (-sq[i + 2].samples()[j] + 8.0 * sq[i + 1].samples()[j] - 8.0 * sq[i - 1].samples()[j]
                    + sq[i - 2].samples()[j])
                    / (12.0 * dt)
            })
            .collect();
        let diff = dfl.with_samples(dt_sq.iter().zip(dfl.samples()).map(|(a, b)| a - b).collect());
        d.times.push(traj.times[i]);
        mismatch.push(diff.l2_norm());
        mean.push(dfl.integral().norm());
    }
    d.residuals.insert("flux".into(), mismatch);
    d.residuals.insert("flux_mean".into(), mean);
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxOrderStudy {
    /// Time at which `∂_t(w²)` is differenced.
    pub time: f64,
    /// Differencing spacings, coarsest first, each half the previous.
    pub spacings: Vec<f64>,
    /// `‖D_Δ(w²) − ∂ₓFl‖_{L²}` for each spacing.
    pub residuals: Vec<f64>,
    /// `‖D_Δ(w²) − D_{Δ/2}(w²)‖_{L²}`; free of the spatial floor of `residuals`.
    pub successive: Vec<f64>,
    /// `log₂` of the last ratio of successive differences.
    pub observed_order: f64,
}

/// Fourth-order central differences of `w²` at the middle snapshot with spacings
/// `stride·Δt` for each stride in `strides` (halving), against `∂ₓFl(w)`. The trajectory
/// must store consecutive, equally spaced snapshots.
pub fn flux_order_study(traj: &Trajectory, flux: &DiffPolynomial, strides: &[usize]) -> Result<FluxOrderStudy> {
    let mid = traj.times.len() / 2;
    let widest = strides.iter().copied().max().unwrap_or(0);
    if strides.len() < 3 || 2 * widest > mid || mid + 2 * widest >= traj.times.len() {
        return Err(NumericsError::Invalid("not enough snapshots for the requested strides".into()));
    }
    let dt = traj.times[1] - traj.times[0];
    let w = &traj.snapshots[mid];
    let dfl = density_samples(flux, &[(Var::W, w)], C64::default(), C64::new(traj.spec.tau0, 0.0))?.derivative(1);
    let sq = |i: usize| traj.snapshots[i].map(|c| c * c);
    let mut study = FluxOrderStudy { time: traj.times[mid], spacings: vec![], residuals: vec![], successive: vec![], observed_order: f64::NAN };
    let mut prev: Option<GridFunction> = None;
    for &st in strides {
        let h = dt * st as f64;
        let (a, b, c, d) = (sq(mid + 2 * st), sq(mid + st), sq(mid - st), sq(mid - 2 * st));
        let fd = w.with_samples(
            (0..w.len())
                .map(|j| (-a.samples()[j] + 8.0 * b.samples()[j] - 8.0 * c.samples()[j] + d.samples()[j]) / (12.0 * h))
                .collect(),
        );
        study.spacings.push(h);
        study.residuals.push(fd.zip_with(&dfl, |x, y| x - y)?.l2_norm());
        if let Some(p) = &prev {
            study.successive.push(fd.zip_with(p, |x, y| x - y)?.l2_norm());
        }
        prev = Some(fd);
    }
    let n = study.successive.len();
    study.observed_order = (study.successive[n - 2] / study.successive[n - 1]).log2();
    Ok(study)
}
