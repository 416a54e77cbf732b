//! `flow`: trajectory, conservation and residual diagnostics, and drift plots.

use crate::config::{Command, RunConfig};
use crate::output::{plot_log, write_atomic, write_json, Curve};
use crate::Failure;
use anyhow::{anyhow, Result};
use hierarchylab_core::algebra::DiffPolynomial;
use hierarchylab_core::hierarchy::{gardner_hamiltonians, lenard_sequence};
use hierarchylab_numerics::flows::{
    conservation_report, evolve, flux_residual, gardner_hamiltonian_list, intertwining_check, DiagnosticsSeries,
    FlowFamily, FlowSpec, Trajectory,
};
use hierarchylab_numerics::{GridFunction, NumericsError, PotentialSpec};
use serde_json::{json, Map, Value};
use std::fmt::Write;

pub fn flow_spec(cfg: &RunConfig) -> Result<FlowSpec> {
    let family = FlowFamily::from_name(&cfg.family)
        .ok_or_else(|| anyhow!("unknown flow family `{}` (expected kdv, gardner, goodvar or tau-flow)", cfg.family))?;
    let mut spec = FlowSpec::new(family, cfg.n);
    spec.tau0 = cfg.tau0;
    spec.tau = cfg.tau;
    spec.grid = cfg.grid;
    spec.period = cfg.period;
    spec.t_end = cfg.t_end;
    spec.dt = cfg.dt;
    spec.sample_every = cfg.sample_every;
    Ok(spec)
}

fn hamiltonians(family: FlowFamily) -> Result<Vec<(String, DiffPolynomial)>> {
    Ok(match family {
        FlowFamily::Gardner => gardner_hamiltonian_list(3)?,
        FlowFamily::Kdv => {
            let t = lenard_sequence(3)?;
            t.hamiltonians.iter().enumerate().map(|(n, h)| (format!("H{n}"), h.density.clone())).collect()
        }
        _ => Vec::new(),
    })
}

fn failure(e: NumericsError) -> Failure {
    let last_good = match &e {
        NumericsError::BlowupDetected { last_good, .. } => Some(*last_good),
        NumericsError::PositivityLost { t, .. } => Some(*t),
        NumericsError::StabilityViolation { .. } => Some(0.0),
        _ => None,
    };
    match last_good {
        Some(t) => Failure::of(Command::Flow, anyhow!("{e}; last good time t = {t}")),
        None => Failure::of(Command::Flow, anyhow!("{e}")),
    }
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,x,re,im\n");
    for (t, snap) in traj.times.iter().zip(&traj.snapshots) {
        for (x, c) in snap.xs().iter().zip(snap.samples()) {
            let _ = writeln!(s, "{t},{x},{},{}", c.re, c.im);
        }
    }
    s
}

fn merge(into: &mut DiagnosticsSeries, from: &DiagnosticsSeries) {
    if into.times == from.times {
        for (k, v) in &from.residuals {
            into.residuals.insert(k.clone(), v.clone());
        }
    }
}

fn drift_curves(d: &DiagnosticsSeries) -> Vec<Curve> {
    d.conserved
        .iter()
        .map(|(name, vals)| {
            let h0 = vals[0];
            let scale = h0.norm().max(1.0);
            Curve { name: name.clone(), points: d.times.iter().zip(vals).map(|(t, v)| (*t, (v - h0).norm() / scale)).collect() }
        })
        .collect()
}

fn residual_curves(d: &DiagnosticsSeries, keys: &[&str]) -> Vec<Curve> {
    keys.iter()
        .filter_map(|k| d.residuals.get(*k).map(|v| (k, v)))
        .map(|(k, v)| Curve { name: k.to_string(), points: d.times.iter().copied().zip(v.iter().copied()).collect() })
        .collect()
}

pub fn initial_data(cfg: &RunConfig, spec: &FlowSpec) -> Result<GridFunction> {
    let p = cfg.potential.first().ok_or_else(|| anyhow!("flow needs an initial potential"))?;
    Ok(PotentialSpec::parse(p)?.on_periodic(spec.period, spec.grid)?)
}

pub fn run(cfg: &RunConfig) -> Result<String, Failure> {
    let io = |e: anyhow::Error| Failure::of(Command::Flow, e);
    let spec = flow_spec(cfg).map_err(Failure::usage)?;
    let q0 = initial_data(cfg, &spec).map_err(Failure::usage)?;
    if cfg.intertwining && spec.family != FlowFamily::Gardner {
        return Err(Failure::usage(anyhow!("the intertwining check runs on the gardner family")));
    }
    let intertwining = if cfg.intertwining { Some(intertwining_check(&spec, &q0, cfg.tau0).map_err(failure)?) } else { None };
    let traj = match &intertwining {
        Some(it) => it.gardner.clone(),
        None => evolve(&spec, &q0).map_err(failure)?,
    };
    let list = hamiltonians(spec.family).map_err(io)?;
    let mut diag = conservation_report(&traj, &list).map_err(failure)?;
    let mut extra = Map::new();
    if spec.family == FlowFamily::Gardner && traj.snapshots.len() >= 5 {
        let flux = gardner_hamiltonians(spec.n).map_err(|e| io(e.into()))?.fluxes[spec.n].clone();
        let f = flux_residual(&traj, &flux).map_err(failure)?;
        extra.insert("flux".into(), json!({ "times": f.times, "residuals": f.residuals }));
    }
    let mut residual_keys = Vec::new();
    if let Some(it) = &intertwining {
        merge(&mut diag, &it.series);
        residual_keys.extend(["miura", "w_map"]);
    }

    let out = cfg.out_dir();
    let mut summary = Map::new();
    summary.insert("steps".into(), json!(spec.steps()));
    summary.insert("effective_dt".into(), json!(spec.effective_dt()));
    summary.insert("snapshots".into(), json!(traj.times.len()));
    let drifts: Map<String, Value> =
        diag.conserved.keys().map(|k| (k.clone(), json!(diag.max_relative_drift(k)))).collect();
    let residuals: Map<String, Value> =
        diag.residuals.keys().map(|k| (k.clone(), json!(diag.max_residual(k)))).collect();
    summary.insert("max_relative_drift".into(), Value::Object(drifts));
    summary.insert("max_residual".into(), Value::Object(residuals));
    let doc = json!({ "config": cfg.to_json(), "summary": summary, "diagnostics": diag, "extra": extra });
    write_json(&out.join("flow.json"), &doc).map_err(io)?;
    let echo = format!("# config: {}\n", serde_json::to_string(&cfg.to_json()).expect("json"));
    write_atomic(&out.join("diagnostics.csv"), format!("{echo}{}", diag.to_csv()).as_bytes()).map_err(io)?;
    write_atomic(&out.join("trajectory.csv"), format!("{echo}{}", trajectory_csv(&traj)).as_bytes()).map_err(io)?;
    let drift = drift_curves(&diag);
    if !drift.is_empty() {
        plot_log(&out.join("drift.svg"), "relative drift", "t", &drift).map_err(io)?;
    }
    if !residual_keys.is_empty() {
        plot_log(&out.join("residuals.svg"), "intertwining residuals", "t", &residual_curves(&diag, &residual_keys))
            .map_err(io)?;
    }
    let mut line = format!("{} N = {}: {} steps to t = {}", spec.family.name(), spec.n, spec.steps(), spec.t_end);
    for k in diag.conserved.keys() {
        let _ = write!(line, ", {k} drift {:.2e}", diag.max_relative_drift(k).unwrap_or(f64::NAN));
    }
    for k in &residual_keys {
        let _ = write!(line, ", {k} {:.2e}", diag.max_residual(k).unwrap_or(f64::NAN));
    }
    Ok(line)
}
