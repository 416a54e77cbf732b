//! `scatter`: one record per (potential, z), a CSV summary and an optional remainder study
//! along the imaginary axis.

use super::cjson;
use crate::config::{Command, RunConfig};
use crate::output::{plot_log, write_atomic, write_json, Curve};
use crate::{thread_pool, Failure};
use anyhow::{anyhow, bail, Result};
use hierarchylab_core::hierarchy::lenard_sequence;
use hierarchylab_numerics::det2::fredholm_log_det2;
use hierarchylab_numerics::ode::OdeOptions;
use hierarchylab_numerics::scattering::{
    approximate_hamiltonian, generating_function_kdv, jost_solutions, kdv_hamiltonian_value, remainder_t_n, Problem,
};
use hierarchylab_numerics::{GridFunction, PotentialSpec, SpectralPoint, C64};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
enum Spectral {
    Schrodinger,
    RealMkdv,
    Nls,
}

fn spectral_problem(family: &str) -> Result<Spectral> {
    Ok(match family {
        "kdv" | "schrodinger" => Spectral::Schrodinger,
        "real-mkdv" | "mkdv" => Spectral::RealMkdv,
        "nls" => Spectral::Nls,
        other => bail!("scatter supports the families kdv, real-mkdv and nls, not `{other}`"),
    })
}

pub fn ode_options(cfg: &RunConfig) -> OdeOptions {
    OdeOptions { rtol: cfg.tol_ode, atol: cfg.tol_ode * 1e-2, ..OdeOptions::default() }
}

/// One (potential, z) evaluation.
#[derive(Clone, Debug)]
struct Row {
    potential: String,
    z: C64,
    transmission: C64,
    t_renormalized: C64,
    log_t_renormalized: C64,
    integral: C64,
    wronskian_drift: f64,
    t_minus_one: Option<(C64, C64, f64)>,
    t_n: Option<C64>,
    det2: Option<(C64, f64, f64)>,
}

impl Row {
    fn to_json(&self, tol: f64) -> Value {
        let mut v = json!({
            "potential": self.potential,
            "z": cjson(self.z),
            "transmission": cjson(self.transmission),
            "t_renormalized": cjson(self.t_renormalized),
            "log_t_renormalized": cjson(self.log_t_renormalized),
            "integral": cjson(self.integral),
            "wronskian_drift": self.wronskian_drift,
        });
        if let Some((jost, riccati, d)) = self.t_minus_one {
            v["t_minus_one"] = json!({ "via_log_t": cjson(jost), "via_w": cjson(riccati), "discrepancy": d });
        }
        if let Some(t) = self.t_n {
            v["t_n"] = cjson(t);
        }
        if let Some((iz_log, err, diff)) = self.det2 {
            v["det2"] = json!({
                "minus_iz_log_det2": cjson(iz_log),
                "extrapolation_error": err,
                "route_difference": diff,
                "within_tolerance": diff < tol,
            });
        }
        v
    }

    fn csv_line(&self) -> String {
        let c = |x: Option<C64>| x.map(|c| format!("{},{}", c.re + 0.0, c.im + 0.0)).unwrap_or_else(|| ",".into());
        format!(
            "{},{},{},{},{},{},{},{},{}\n",
            quote(&self.potential),
            c(Some(self.z)),
            c(Some(self.transmission)),
            c(Some(self.t_renormalized)),
            c(self.t_minus_one.map(|t| t.1)),
            c(self.t_n),
            c(self.det2.map(|d| d.0)),
            self.det2.map(|d| d.2.to_string()).unwrap_or_default(),
            self.wronskian_drift
        )
    }
}

const CSV_HEADER: &str = "potential,z_re,z_im,T_re,T_im,T_r_re,T_r_im,T_minus1_re,T_minus1_im,T_N_re,T_N_im,\
minus_iz_log_det2_re,minus_iz_log_det2_im,route_difference,wronskian_drift\n";

fn quote(s: &str) -> String {
    if s.contains(',') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sample(spec: &PotentialSpec, cfg: &RunConfig) -> Result<GridFunction> {
    Ok(spec.on_line(cfg.grid, cfg.tail_tol)?)
}

fn evaluate(cfg: &RunConfig, kind: Spectral, spec: &PotentialSpec, u: &GridFunction, z: SpectralPoint) -> Result<Row> {
    let opts = ode_options(cfg);
    let conj = u.map(|c| c.conj());
    let problem = match kind {
        Spectral::Schrodinger => Problem::Schrodinger(u),
        Spectral::RealMkdv => Problem::Akns { q: u, r: u },
        Spectral::Nls => Problem::Akns { q: u, r: &conj },
    };
    let rec = jost_solutions(problem, z, &opts)?;
    let mut row = Row {
        potential: spec.canonical(),
        z: z.z,
        transmission: rec.transmission,
        t_renormalized: rec.t_renormalized,
        log_t_renormalized: rec.log_t_renormalized,
        integral: rec.integral,
        wronskian_drift: rec.wronskian_drift,
        t_minus_one: None,
        t_n: None,
        det2: None,
    };
    if kind != Spectral::Schrodinger {
        return Ok(row);
    }
    let g = generating_function_kdv(u, z, &opts)?;
    row.t_minus_one = Some((g.via_log_t, g.via_w, g.discrepancy));
    if let Some(n) = cfg.remainder {
        let kdv = lenard_sequence(n.max(0) as usize)?;
        row.t_n = Some(remainder_t_n(n, z, u, &kdv, &opts)?);
    }
    if cfg.det2 {
        let d = fredholm_log_det2(u, z, cfg.det2_grid)?;
        // iz·log det₂ = −𝒯₋₁
        let minus = -(I * z.z * d.log_det2);
        row.det2 = Some((minus, (z.z * d.error_estimate).norm(), (minus - g.via_w).norm()));
    }
    Ok(row)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `|(2iτ)²𝒯_{N−1}(iτ) − H_N|` for each τ on the ray, and the fitted slope.
pub fn remainder_study(u: &GridFunction, n: usize, taus: &[f64], opts: &OdeOptions) -> Result<(C64, Vec<(f64, C64, f64)>, f64)> {
    let kdv = lenard_sequence(n)?;
    let h = kdv_hamiltonian_value(n, u, &kdv)?;
    let mut rows = Vec::new();
    for &tau in taus {
        let a = approximate_hamiltonian(n, tau, u, &kdv, opts)?;
        rows.push((tau, a, (a - h).norm()));
    }
    let slope = loglog_slope(&rows.iter().map(|r| (r.0, r.2)).collect::<Vec<_>>());
    Ok((h, rows, slope))
}

pub fn run(cfg: &RunConfig) -> Result<String, Failure> {
    let fail = |e: anyhow::Error| Failure::of(Command::Scatter, e);
    let kind = spectral_problem(&cfg.family).map_err(Failure::usage)?;
    let specs: Vec<PotentialSpec> =
        cfg.potential.iter().map(|p| PotentialSpec::parse(p)).collect::<Result<_, _>>().map_err(Failure::usage)?;
    let zs: Vec<SpectralPoint> = cfg
        .z
        .iter()
        .map(|z| SpectralPoint::parse(z).map_err(|e| anyhow!("z = {z}: {e}")))
        .collect::<Result<_>>()
        .map_err(fail)?;
    if cfg.remainder.is_some_and(|n| n < -1) {
        return Err(Failure::usage(anyhow!("remainder order must be at least -1")));
    }
    let mut samples = Vec::new();
    for s in &specs {
        samples.push(sample(s, cfg).map_err(|e| fail(anyhow!("potential {}: {e}", s.canonical())))?);
    }
    let jobs: Vec<(usize, SpectralPoint)> = (0..specs.len()).flat_map(|i| zs.iter().map(move |&z| (i, z))).collect();
    let pool = thread_pool().map_err(fail)?;
    let rows: Vec<Result<Row>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, z)| {
                evaluate(cfg, kind, &specs[i], &samples[i], z)
                    .map_err(|e| anyhow!("potential {}, z = {}: {e}", specs[i].canonical(), z.z))
            })
            .collect()
    });
    let rows: Vec<Row> = rows.into_iter().collect::<Result<_>>().map_err(fail)?;

    let out = cfg.out_dir();
    let records: Vec<Value> = rows.iter().map(|r| r.to_json(cfg.tol_residual)).collect();
    write_json(&out.join("scatter.json"), &json!({ "config": cfg.to_json(), "records": records })).map_err(fail)?;
    let mut csv = String::from(CSV_HEADER);
    rows.iter().for_each(|r| csv.push_str(&r.csv_line()));
    write_atomic(&out.join("scatter.csv"), csv.as_bytes()).map_err(fail)?;
    let mut summary = format!("{} records written to {}", rows.len(), out.join("scatter.json").display());

    if let (Some(n), Spectral::Schrodinger) = (cfg.remainder, kind) {
        if n >= 0 {
            let opts = ode_options(cfg);
            let mut studies = Vec::new();
            let mut csv = String::from("potential,tau,approx_re,approx_im,error\n");
            let mut curves = Vec::new();
            for (s, u) in specs.iter().zip(&samples) {
                let (h, pts, slope) = remainder_study(u, n as usize, &cfg.z_ray, &opts)
                    .map_err(|e| fail(anyhow!("remainder study for {}: {e}", s.canonical())))?;
                for (tau, a, e) in &pts {
                    let _ = writeln!(csv, "{},{tau},{},{},{e}", quote(&s.canonical()), a.re, a.im);
                }
                studies.push(json!({
                    "potential": s.canonical(),
                    "hamiltonian": cjson(h),
                    "points": pts.iter().map(|(t, a, e)| json!({ "tau": t, "approximation": cjson(*a), "error": e })).collect::<Vec<_>>(),
                    "slope": slope,
                }));
                let _ = write!(summary, "\nremainder N = {n}, {}: slope {slope:.3}", s.canonical());
                curves.push(Curve { name: s.canonical(), points: pts.iter().map(|p| (p.0, p.2)).collect() });
            }
            write_json(&out.join("remainder.json"), &json!({ "config": cfg.to_json(), "n": n, "studies": studies }))
                .map_err(fail)?;
            write_atomic(&out.join("remainder.csv"), csv.as_bytes()).map_err(fail)?;
            plot_log(&out.join("remainder.svg"), &format!("remainder, N = {n}"), "tau", &curves).map_err(fail)?;
        }
    }
    Ok(summary)
}
