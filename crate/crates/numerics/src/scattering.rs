//! Jost solutions, transmission coefficients, Riccati/Miura maps and the diagonal
//! Green's function on a truncated line.
//!
//! Jost solutions are stored in renormalized form: `ψ_l = e^{−izx} m_l` with
//! `m_l″ − 2iz m_l′ = u m_l`, `m_l → 1` at the left end, and `ψ_r = e^{izx} m_r` with
//! `m_r″ + 2iz m_r′ = u m_r`, `m_r → 1` at the right end. Both directions are the stable
//! ones for `Im z > 0`, and outside the truncation interval the solutions are known exactly.

use crate::density::evaluate_density;
use crate::error::{NumericsError, Result};
use crate::grid::{GridFunction, C64, TAIL_TOL};
use crate::ode::{solve_on_nodes, OdeOptions};
use hierarchylab_core::algebra::Var;
use hierarchylab_core::hierarchy::KdvTable;
use serde::Serialize;
use std::f64::consts::PI;

/// Residual gate for returned fields.
pub const RESIDUAL_TOL: f64 = 1e-7;
/// Cross-route gate for the generating function.
pub const CROSS_ROUTE_TOL: f64 = 1e-6;
/// Margin for the positivity test of the Miura range.
pub const POSITIVITY_MARGIN: f64 = 1e-12;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub z: C64,
}

impl SpectralPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.im > 0.0) {
            return Err(NumericsError::LowerHalfPlane(format!("{z}")));
        }
        Ok(SpectralPoint { z })
    }

    pub fn i_tau(tau: f64) -> Result<Self> {
        Self::new(C64::new(0.0, tau))
    }

    /// Parses `a+bi`, `bi`, `a-bi` or `a`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_complex(s)?)
    }
}

/// Parses complex literals such as `1+2i`, `0+2i`, `4i`, `-0.5-1.5i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || NumericsError::Invalid(format!("cannot parse complex number `{s}`"));
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').last().map(|(k, _)| k);
        let split = split.filter(|&k| !matches!(body.as_bytes()[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse().map_err(|_| bad())?,
        };
        Ok(C64::new(re.parse().map_err(|_| bad())?, im))
    } else {
        Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Problem<'a> {
    /// `−ψ″ + uψ = z²ψ`.
    Schrodinger(&'a GridFunction),
    /// `ψ′ = [[−iz, q], [r, iz]] ψ`.
    Akns { q: &'a GridFunction, r: &'a GridFunction },
}

#[derive(Clone, Debug)]
pub struct ScatteringRecord {
    pub z: C64,
    /// Unrenormalized transmission coefficient.
    pub transmission: C64,
    pub t_renormalized: C64,
    /// `log T` on the branch continued along x from the free problem.
    pub log_t: C64,
    pub log_t_renormalized: C64,
    /// `∫u` (Schrödinger) or `∫qr` (AKNS).
    pub integral: C64,
    /// Renormalized left Jost solution: `[m_l, m_l′]` or `[m1, m2]`.
    pub jost_left: Vec<GridFunction>,
    pub jost_right: Vec<GridFunction>,
    /// `max_x |W(x) − W(mid)| / |W(mid)|`.
    pub wronskian_drift: f64,
    pub w_of_z: Option<GridFunction>,
    pub beta: Option<GridFunction>,
    pub v: Option<GridFunction>,
}

fn line_input(u: &GridFunction) -> Result<()> {
    if u.is_periodic() {
        return Err(NumericsError::PeriodicRejected);
    }
    u.check_tail(TAIL_TOL)
}

fn column(states: &[Vec<C64>], k: usize) -> Vec<C64> {
    states.iter().map(|s| s[k]).collect()
}

/// Integrates both Jost solutions and evaluates the Wronskian on the grid.
pub fn jost_solutions(problem: Problem<'_>, z: SpectralPoint, opts: &OdeOptions) -> Result<ScatteringRecord> {
    match problem {
        Problem::Schrodinger(u) => schrodinger_jost(u, z.z, opts),
        Problem::Akns { q, r } => akns_jost(q, r, z.z, opts),
    }
}

fn schrodinger_jost(u: &GridFunction, z: C64, opts: &OdeOptions) -> Result<ScatteringRecord> {
    line_input(u)?;
    let ip = u.interpolant();
    let xs = u.xs();
    let tiz = 2.0 * I * z;
    let rev: Vec<f64> = xs.iter().rev().copied().collect();
    let (mut right, _) = solve_on_nodes(
        |x, y, dy| {
            dy[0] = y[1];
            dy[1] = -tiz * y[1] + ip.eval(x) * y[0];
        },
        &rev,
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        opts,
    )?;
    right.reverse();
    let wronskian = |left: &[Vec<C64>]| -> Vec<C64> {
        (0..xs.len())
            .map(|j| left[j][1] * right[j][0] - left[j][0] * right[j][1] - tiz * left[j][0] * right[j][0])
            .collect()
    };
    let mid = xs.len() / 2;
    let at_eigenvalue = |w_mid: C64| w_mid.norm() < 1e-12 * tiz.norm();
    // [m, m′, ∫u, log m]
    let left = solve_on_nodes(
        |x, y, dy| {
            let ux = ip.eval(x);
            dy[0] = y[1];
            dy[1] = tiz * y[1] + ux * y[0];
            dy[2] = ux;
            dy[3] = y[1] / y[0];
        },
        &xs,
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        opts,
    );
    let left = match left {
        Ok((left, _)) => left,
        Err(e @ NumericsError::StiffnessFailure { .. }) => {
            // log m breaks down where m vanishes; decide with the linear system alone
            let (lin, _) = solve_on_nodes(
                |x, y, dy| {
                    dy[0] = y[1];
                    dy[1] = tiz * y[1] + ip.eval(x) * y[0];
                },
                &xs,
                &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                opts,
            )?;
            let w_mid = wronskian(&lin)[mid];
            if at_eigenvalue(w_mid) {
                return Err(NumericsError::AtEigenvalue { z: format!("{z}"), wronskian: w_mid.norm() });
            }
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    let wr = wronskian(&left);
    let w_mid = wr[mid];
    if at_eigenvalue(w_mid) {
        return Err(NumericsError::AtEigenvalue { z: format!("{z}"), wronskian: w_mid.norm() });
    }
    let drift = wr.iter().map(|w| (w - w_mid).norm()).fold(0.0, f64::max) / w_mid.norm();
    let t = -tiz / w_mid;
    let end = &left[xs.len() - 1];
    let log_t = branch_log(t, -end[3])?;
    let integral = end[2];
    let log_tr = log_t + I / (2.0 * z) * integral;
    Ok(ScatteringRecord {
        z,
        transmission: t,
        t_renormalized: log_tr.exp(),
        log_t,
        log_t_renormalized: log_tr,
        integral,
        jost_left: vec![u.with_samples(column(&left, 0)), u.with_samples(column(&left, 1))],
        jost_right: vec![u.with_samples(column(&right, 0)), u.with_samples(column(&right, 1))],
        wronskian_drift: drift,
        w_of_z: None,
        beta: None,
        v: None,
    })
}

fn akns_jost(q: &GridFunction, r: &GridFunction, z: C64, opts: &OdeOptions) -> Result<ScatteringRecord> {
    line_input(q)?;
    line_input(r)?;
    q.ensure_same_grid(r)?;
    let (iq, ir) = (q.interpolant(), r.interpolant());
    let xs = q.xs();
    let tiz = 2.0 * I * z;
    // [m1, m2, ∫qr, log m1]
    let (left, _) = solve_on_nodes(
        |x, y, dy| {
            let (qx, rx) = (iq.eval(x), ir.eval(x));
            dy[0] = qx * y[1];
            dy[1] = rx * y[0] + tiz * y[1];
            dy[2] = qx * rx;
            dy[3] = qx * y[1] / y[0];
        },
        &xs,
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        opts,
    )?;
    let rev: Vec<f64> = xs.iter().rev().copied().collect();
    let (mut right, _) = solve_on_nodes(
        |x, y, dy| {
            dy[0] = -tiz * y[0] + iq.eval(x) * y[1];
            dy[1] = ir.eval(x) * y[0];
        },
        &rev,
        &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        opts,
    )?;
    right.reverse();
    let det: Vec<C64> = (0..xs.len()).map(|j| left[j][0] * right[j][1] - left[j][1] * right[j][0]).collect();
    let mid = xs.len() / 2;
    let d_mid = det[mid];
    if d_mid.norm() < 1e-12 {
        return Err(NumericsError::AtEigenvalue { z: format!("{z}"), wronskian: d_mid.norm() });
    }
    let drift = det.iter().map(|d| (d - d_mid).norm()).fold(0.0, f64::max) / d_mid.norm();
    let t = 1.0 / d_mid;
    let end = &left[xs.len() - 1];
    let log_t = branch_log(t, -end[3])?;
    let integral = end[2];
    let log_tr = log_t + I / (2.0 * z) * integral;
    Ok(ScatteringRecord {
        z,
        transmission: t,
        t_renormalized: log_tr.exp(),
        log_t,
        log_t_renormalized: log_tr,
        integral,
        jost_left: vec![q.with_samples(column(&left, 0)), q.with_samples(column(&left, 1))],
        jost_right: vec![q.with_samples(column(&right, 0)), q.with_samples(column(&right, 1))],
        wronskian_drift: drift,
        w_of_z: None,
        beta: None,
        v: None,
    })
}

/// Picks the branch of `log t` closest to the continued value `guess`.
fn branch_log(t: C64, guess: C64) -> Result<C64> {
    let principal = t.ln();
    let k = ((guess.im - principal.im) / (2.0 * PI)).round();
    let l = principal + C64::new(0.0, 2.0 * PI * k);
    let gap = (l - guess).norm();
    if !gap.is_finite() || gap > 1e-3 * (1.0 + l.norm()) {
        return Err(NumericsError::BranchAmbiguity(format!(
            "Wronskian route {l} and continued log {guess} differ by {gap:.3e}"
        )));
    }
    Ok(l)
}

/// `T_r` for Schrödinger problems and `T` for AKNS problems.
pub fn transmission(problem: Problem<'_>, z: SpectralPoint, opts: &OdeOptions) -> Result<C64> {
    let rec = jost_solutions(problem, z, opts)?;
    Ok(match problem {
        Problem::Schrodinger(_) => rec.t_renormalized,
        Problem::Akns { .. } => rec.transmission,
    })
}

/// `u = w′ + 2τw + w²`.
pub fn miura_forward(w: &GridFunction, tau: f64) -> GridFunction {
    let dw = w.derivative(1);
    w.zip_with(&dw, |a, d| d + 2.0 * tau * a + a * a).expect("same grid")
}

/// `sup |w′ − 2izw + w² − source|` with grid derivatives.
pub fn riccati_residual(w: &GridFunction, source: &GridFunction, z: C64) -> Result<f64> {
    let dw = w.derivative(1);
    let lhs = w.zip_with(&dw, |a, d| d - 2.0 * I * z * a + a * a)?;
    lhs.max_abs_diff(source)
}

/// Result of the left Riccati solve: `w(z) = m_l′/m_l` and `∫w(z)²` accumulated along the ODE.
#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    pub w: GridFunction,
    pub m: GridFunction,
    pub integral_w_sq: C64,
}

fn left_riccati(source: &GridFunction, z: C64, opts: &OdeOptions) -> Result<RiccatiSolution> {
    line_input(source)?;
    let ip = source.interpolant();
    let xs = source.xs();
    let tiz = 2.0 * I * z;
    // [m, m′, ∫(m′/m)²]
    let st = solve_on_nodes(
        |x, y, dy| {
            dy[0] = y[1];
            dy[1] = tiz * y[1] + ip.eval(x) * y[0];
            let w = y[1] / y[0];
            dy[2] = w * w;
        },
        &xs,
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        opts,
    );
    let st = match st {
        Ok((st, _)) => st,
        Err(e @ NumericsError::StiffnessFailure { .. }) => {
            // w = m′/m is singular where m vanishes; report where the linear solution does
            let (lin, _) = solve_on_nodes(
                |x, y, dy| {
                    dy[0] = y[1];
                    dy[1] = tiz * y[1] + ip.eval(x) * y[0];
                },
                &xs,
                &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                opts,
            )?;
            let (j, min) = lin
                .iter()
                .enumerate()
                .map(|(j, s)| (j, s[0].re))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            if min <= POSITIVITY_MARGIN {
                return Err(NumericsError::NotInMiuraRange { tau: z.im, x: xs[j], value: min });
            }
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    let m = source.with_samples(column(&st, 0));
    let w = source.with_samples(st.iter().map(|s| s[1] / s[0]).collect());
    Ok(RiccatiSolution { w, m, integral_w_sq: st[st.len() - 1][2] })
}

/// `w = ∂ₓ log ψ_l − τ` at `z = iτ`, i.e. the decaying solution of `w′ + 2τw + w² = u`.
pub fn miura_inverse(u: &GridFunction, tau: f64, opts: &OdeOptions) -> Result<GridFunction> {
    let sol = left_riccati(u, C64::new(0.0, tau), opts)?;
    let (j, min) = sol
        .m
        .samples()
        .iter()
        .enumerate()
        .map(|(j, c)| (j, c.re))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if !(min > POSITIVITY_MARGIN) {
        return Err(NumericsError::NotInMiuraRange { tau, x: u.x(j), value: min });
    }
    let res = riccati_residual(&sol.w, u, C64::new(0.0, tau))?;
    if res > RESIDUAL_TOL {
        return Err(NumericsError::ResidualTooLarge { what: "Riccati".into(), value: res, tol: RESIDUAL_TOL });
    }
    Ok(sol.w)
}

/// `w(z)` with `w(z)′ − 2iz w(z) + w(z)² = source`, decaying at the left end.
pub fn riccati_shifted(source: &GridFunction, z: SpectralPoint, opts: &OdeOptions) -> Result<RiccatiSolution> {
    let sol = left_riccati(source, z.z, opts)?;
    let (j, min) = sol
        .m
        .samples()
        .iter()
        .enumerate()
        .map(|(j, c)| (j, c.norm()))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if !(min > POSITIVITY_MARGIN) || (z.z.re == 0.0 && source.max_abs_im() == 0.0 && sol.m.min_re() <= 0.0) {
        return Err(NumericsError::NotInMiuraRange { tau: z.z.im, x: source.x(j), value: min });
    }
    let res = riccati_residual(&sol.w, source, z.z)?;
    if res > RESIDUAL_TOL {
        return Err(NumericsError::ResidualTooLarge { what: "Riccati".into(), value: res, tol: RESIDUAL_TOL });
    }
    Ok(sol)
}

/// Bounded solution of `−y′ + 2τy + 2wy = f` on the line, integrated from the right end
/// where `y = f/(2τ)` (`w` and `f′` negligible there).
pub fn green_solve(w: &GridFunction, f: &GridFunction, tau: f64, opts: &OdeOptions) -> Result<GridFunction> {
    line_input(w)?;
    w.ensure_same_grid(f)?;
    let (iw, iff) = (w.interpolant(), f.interpolant());
    let rev: Vec<f64> = w.xs().iter().rev().copied().collect();
    let n = w.len();
    let y0 = f.samples()[n - 1] / (2.0 * tau + 2.0 * w.samples()[n - 1]);
    let (mut st, _) = solve_on_nodes(
        |x, y, dy| {
            dy[0] = (2.0 * tau + 2.0 * iw.eval(x)) * y[0] - iff.eval(x);
        },
        &rev,
        &[y0],
        opts,
    )?;
    st.reverse();
    Ok(w.with_samples(column(&st, 0)))
}

/// `sup |−y′ + 2τy + 2wy − f|`.
pub fn green_residual(y: &GridFunction, w: &GridFunction, f: &GridFunction, tau: f64) -> Result<f64> {
    let dy = y.derivative(1);
    let s: Vec<C64> = (0..y.len())
        .map(|j| -dy.samples()[j] + (2.0 * tau + 2.0 * w.samples()[j]) * y.samples()[j] - f.samples()[j])
        .collect();
    Ok(s.iter().map(|c| c.norm()).fold(0.0, f64::max))
}

/// The inverse of the good-variable map: `W(τ, v) = τv − ½∂ₓ log(1+v)`.
pub fn w_from_v(v: &GridFunction, tau: f64) -> Result<GridFunction> {
    let l = v.map(|c| (1.0 + c).ln());
    let dl = l.derivative(1);
    v.zip_with(&dl, |a, d| tau * a - 0.5 * d)
}

#[derive(Clone, Debug)]
pub struct GreenAndV {
    pub beta: GridFunction,
    pub v: GridFunction,
    pub green_residual: f64,
    pub good_variable_residual: f64,
}

/// `β = (−∂ + 2τ + 2w)⁻¹ 1` and `v = 1/(2τβ) − 1`.
pub fn diagonal_green_and_v(w: &GridFunction, tau: f64, opts: &OdeOptions) -> Result<GreenAndV> {
    let one = w.map(|_| C64::new(1.0, 0.0));
    let beta = green_solve(w, &one, tau, opts)?;
    let v = beta.map(|b| 1.0 / (2.0 * tau * b) - 1.0);
    let min = v.samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(NumericsError::SingularS(min));
    }
    let gr = green_residual(&beta, w, &one, tau)?;
    // 2τv − ∂ log(1+v) = 2w
    let back = w_from_v(&v, tau)?;
    let gv = 2.0 * back.max_abs_diff(w)?;
    for (what, value) in [("Green", gr), ("good-variable", gv)] {
        if value > RESIDUAL_TOL {
            return Err(NumericsError::ResidualTooLarge { what: what.into(), value, tol: RESIDUAL_TOL });
        }
    }
    Ok(GreenAndV { beta, v, green_residual: gr, good_variable_residual: gv })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneratingValue {
    /// Through `iz log T_r` (Wronskian route).
    pub via_log_t: C64,
    /// Through `−½∫w(z)²` (Riccati route).
    pub via_w: C64,
    pub discrepancy: f64,
}

fn cross_checked(via_log_t: C64, via_w: C64) -> Result<GeneratingValue> {
    let discrepancy = (via_log_t - via_w).norm();
    if discrepancy > CROSS_ROUTE_TOL {
        return Err(NumericsError::ResidualTooLarge {
            what: "generating function cross-route".into(),
            value: discrepancy,
            tol: CROSS_ROUTE_TOL,
        });
    }
    Ok(GeneratingValue { via_log_t, via_w, discrepancy })
}

/// `𝒯₋₁(z, u)` computed as `iz log T_r` and as `−½∫w(z)²`.
pub fn generating_function_kdv(u: &GridFunction, z: SpectralPoint, opts: &OdeOptions) -> Result<GeneratingValue> {
    if u.sup_norm() == 0.0 {
        return Ok(GeneratingValue { via_log_t: C64::new(0.0, 0.0), via_w: C64::new(0.0, 0.0), discrepancy: 0.0 });
    }
    let rec = jost_solutions(Problem::Schrodinger(u), z, opts)?;
    let ric = left_riccati(u, z.z, opts)?;
    cross_checked(I * z.z * rec.log_t_renormalized, -0.5 * ric.integral_w_sq)
}

/// `𝒯₋₁^{Gardner}(z, w, τ₀) = (4z² + 4τ₀²)⁻¹ (½∫w² + 𝒯₋₁^{KdV}(z, M(w)))`.
pub fn generating_function_gardner(w: &GridFunction, tau0: f64, z: SpectralPoint, opts: &OdeOptions) -> Result<GeneratingValue> {
    let pref = 1.0 / (4.0 * z.z * z.z + 4.0 * tau0 * tau0);
    let half_l2 = 0.5 * w.map(|c| c * c).integral();
    let u = miura_forward(w, tau0);
    let k = generating_function_kdv(&u, z, opts)?;
    cross_checked(pref * (half_l2 + k.via_log_t), pref * (half_l2 + k.via_w))
}

/// `H_n^{KdV}(u)` by quadrature.
pub fn kdv_hamiltonian_value(n: usize, u: &GridFunction, kdv: &KdvTable) -> Result<C64> {
    let h = kdv
        .hamiltonians
        .get(n)
        .ok_or_else(|| NumericsError::Invalid(format!("KdV table has no H_{n}")))?;
    evaluate_density(&h.density, &[(Var::U, u)], C64::new(0.0, 0.0), C64::new(0.0, 0.0))
}

/// `𝒯_N(z, u) = (2z)^{2N+2} 𝒯₋₁(z, u) − Σ_{n=0}^{N} (2z)^{2(N−n)} H_n(u)` for `N ≥ −1`.
pub fn remainder_t_n(n: i64, z: SpectralPoint, u: &GridFunction, kdv: &KdvTable, opts: &OdeOptions) -> Result<C64> {
    if n < -1 {
        return Err(NumericsError::Invalid(format!("N = {n} < -1")));
    }
    let t = generating_function_kdv(u, z, opts)?.via_w;
    let two_z = 2.0 * z.z;
    let mut acc = two_z.powi(2 * n as i32 + 2) * t;
    for k in 0..=n {
        acc -= two_z.powi(2 * (n - k) as i32) * kdv_hamiltonian_value(k as usize, u, kdv)?;
    }
    Ok(acc)
}

/// `(2iτ)² 𝒯_{N−1}(iτ, u)`, which tends to `H_N(u)` as `τ → ∞`.
pub fn approximate_hamiltonian(n: usize, tau: f64, u: &GridFunction, kdv: &KdvTable, opts: &OdeOptions) -> Result<C64> {
    let z = SpectralPoint::i_tau(tau)?;
    Ok(C64::new(0.0, 2.0 * tau).powi(2) * remainder_t_n(n as i64 - 1, z, u, kdv, opts)?)
}

#[derive(Clone, Debug)]
pub struct TauFlowField {
    pub w: GridFunction,
    /// `F = (−∂ + 2τ + 2w)⁻¹ w`.
    pub f: GridFunction,
    /// `∂ₓF`.
    pub vector_field: GridFunction,
    pub residual: f64,
}

/// `u_t = ∂ₓ(−∂ + 2τ + 2w)⁻¹ w` with `w` the Miura inverse of `u` at `τ`.
pub fn tau_flow_vf(u: &GridFunction, tau: f64, opts: &OdeOptions) -> Result<TauFlowField> {
    let w = miura_inverse(u, tau, opts)?;
    let f = green_solve(&w, &w, tau, opts)?;
    let residual = green_residual(&f, &w, &w, tau)?;
    if residual > RESIDUAL_TOL {
        return Err(NumericsError::ResidualTooLarge { what: "tau-flow".into(), value: residual, tol: RESIDUAL_TOL });
    }
    // F′ from the defining relation rather than from differencing
    let samples = (0..f.len())
        .map(|j| (2.0 * tau + 2.0 * w.samples()[j]) * f.samples()[j] - w.samples()[j])
        .collect();
    Ok(TauFlowField { vector_field: f.with_samples(samples), w, f, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauFlowProbe {
    /// `𝒯₋₁(iτ₁, u)` at the base point.
    pub value: C64,
    /// Centered difference of `𝒯₋₁(iτ₁, u ± dt·X)` with `X` the τ₂-flow field.
    pub derivative: C64,
}

/// Rate of change of `𝒯₋₁(iτ₁)` along the τ₂-flow through `u`, by a centered difference over
/// one explicit Euler microstep in each direction.
pub fn tau_flow_conservation_probe(u: &GridFunction, tau_flow: f64, tau_probe: f64, dt: f64, opts: &OdeOptions) -> Result<TauFlowProbe> {
    let x = tau_flow_vf(u, tau_flow, opts)?.vector_field;
    let z = SpectralPoint::i_tau(tau_probe)?;
    let plus = u.zip_with(&x, |a, b| a + dt * b)?;
    let minus = u.zip_with(&x, |a, b| a - dt * b)?;
    let tp = generating_function_kdv(&plus, z, opts)?.via_w;
    let tm = generating_function_kdv(&minus, z, opts)?.via_w;
    Ok(TauFlowProbe { value: generating_function_kdv(u, z, opts)?.via_w, derivative: (tp - tm) / (2.0 * dt) })
}
