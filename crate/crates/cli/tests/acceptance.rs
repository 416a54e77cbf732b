//! End-to-end acceptance run. Each criterion prints one `PASS`/`FAIL` line to stderr
//! (bypassing output capture) and the test fails if any criterion fails.

use hierarchylab_core::algebra::json::from_json_value;
use hierarchylab_core::algebra::*;
use hierarchylab_core::hierarchy::akns::{complex_kdv_beta_residuals, complex_kdv_beta_residuals_underived};
use hierarchylab_core::hierarchy::reference::{parse_entry, refute, Kind, ENTRIES, ERRATA};
use hierarchylab_core::hierarchy::*;
use hierarchylab_numerics::det2::fredholm_log_det2;
use hierarchylab_numerics::flows::*;
use hierarchylab_numerics::ode::OdeOptions;
use hierarchylab_numerics::scattering::*;
use hierarchylab_numerics::{Geometry, GridFunction, PotentialSpec, C64};
use serde_json::Value;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ok_if(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn same(a: &FunctionalDensity, b: &FunctionalDensity) -> bool {
    equal_mod_total_derivative(a, b).unwrap()
}

fn binom(n: u64, k: u64) -> i64 {
    (1..=k).fold(1u128, |acc, i| acc * (n - k + i) as u128 / i as u128) as i64
}

fn report(id: usize, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    let dt = t0.elapsed();
    let over = budget.is_some_and(|b| dt > b);
    let (passed, mut detail) = match r {
        Ok(d) => (!over, d),
        Err(d) => (false, d),
    };
    if over {
        detail += &format!("; runtime over budget {:?}", budget.unwrap());
    }
    let line = format!(
        "criterion {id:>2} {} {title}: {detail} [{:.1} s]\n",
        if passed { "PASS" } else { "FAIL" },
        dt.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    passed
}

fn gen_json(family: Family, n: usize, out: &Path) -> Value {
    let st = Command::new(env!("CARGO_BIN_EXE_hierarchylab"))
        .args(["gen", "--family", family.name(), "--n", &n.to_string(), "--out"])
        .arg(out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(out.join(family.name()).join(format!("{n}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn criterion_1() -> Outcome {
    let dir = std::env::temp_dir().join(format!("hl-acc-{}", std::process::id()));
    let mut max_n: BTreeMap<&str, (Family, usize)> = BTreeMap::new();
    for e in ENTRIES {
        let slot = max_n.entry(e.family.name()).or_insert((e.family, 0));
        slot.1 = slot.1.max(e.n);
    }
    let docs: BTreeMap<&str, Value> = max_n.iter().map(|(k, (f, n))| (*k, gen_json(*f, *n, &dir))).collect();
    let _ = std::fs::remove_dir_all(&dir);
    let mut matched = 0;
    let mut mismatched = Vec::new();
    for e in ENTRIES {
        let doc = &docs[e.family.name()];
        let row = doc["table"]["entries"].as_array().unwrap().iter().find(|r| r["n"] == e.n).ok_or(format!("{e:?} missing"))?;
        let key = match e.kind {
            Kind::Alpha => "alpha",
            Kind::Beta => "beta",
            Kind::Gamma => "gamma",
            Kind::Hamiltonian => "hamiltonian",
        };
        let generated = from_json_value(&row[key]["json"]).map_err(|err| format!("{e:?}: {err}"))?.scale_int(e.scale);
        let listed = parse_entry(e).map_err(|err| err.to_string())?;
        let equal = if e.kind == Kind::Hamiltonian {
            same(&FunctionalDensity::new(generated), &FunctionalDensity::new(listed))
        } else {
            generated == listed
        };
        if equal {
            matched += 1;
        } else {
            mismatched.push((e.family, e.kind, e.n));
        }
    }
    for m in &mismatched {
        let x = ERRATA.iter().find(|x| (x.family, x.kind, x.n) == *m).ok_or(format!("unexplained mismatch {m:?}"))?;
        if !refute(x).map_err(|e| e.to_string())? {
            return Err(format!("misprint {m:?} is not refuted"));
        }
    }
    ok_if(
        mismatched.len() == ERRATA.len(),
        format!("{matched} of {} tabulated entries equal; {} independently refuted misprints", ENTRIES.len(), mismatched.len()),
    )
}

fn criterion_2() -> Outcome {
    let t = lenard_sequence(4).map_err(|e| e.to_string())?;
    for lt in leading_terms(&t) {
        let n = lt.n as u64;
        let c = binom(2 * n + 2, n + 1);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        if lt.linear_gradient_coeff != GaussianRational::from_int(sign) {
            return Err(format!("u^(2n) coefficient at n = {n}"));
        }
        if lt.top_gradient_coeff != GaussianRational::from_ratio(c, 2) {
            return Err(format!("u^(n+1) gradient coefficient at n = {n}"));
        }
        let halved = GaussianRational::from_ratio(c, 2 * (n as i64 + 2));
        let unhalved = GaussianRational::from_ratio(c, n as i64 + 2);
        if lt.top_hamiltonian_coeff != halved || lt.top_hamiltonian_coeff == unhalved {
            return Err(format!("u^(n+2) density coefficient at n = {n}"));
        }
    }
    Ok("G_n leading (−1)ⁿu^(2n); u^(n+2) coefficient C(2n+2,n+1)/(2(n+2)) in the ½ convention, twice that unhalved (n ≤ 4)".into())
}

fn criterion_3() -> Outcome {
    let k = lenard_sequence(4).map_err(|e| e.to_string())?;
    let mut count = 0;
    for s in [BracketStructure::Gardner, BracketStructure::Magri] {
        for i in 0..=4 {
            for j in 0..=4 {
                if !poisson_bracket(&k.hamiltonians[i], &k.hamiltonians[j], s).unwrap().commutes {
                    return Err(format!("KdV {s:?} H{i}, H{j}"));
                }
                count += 1;
            }
        }
    }
    let g = gardner_hamiltonians(3).map_err(|e| e.to_string())?;
    for i in 0..=3 {
        for j in 0..=3 {
            if !poisson_bracket(&g.hamiltonians[i], &g.hamiltonians[j], BracketStructure::Gardner).unwrap().commutes {
                return Err(format!("Gardner H{i}, H{j}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} brackets are total derivatives"))
}

fn criterion_4() -> Outcome {
    let k = lenard_sequence(3).map_err(|e| e.to_string())?;
    let g = gardner_hamiltonians(4).map_err(|e| e.to_string())?;
    let miura = parse_poly("w' + 2 tau0 w + w^2").unwrap();
    let four_tau0_sq = ParamCoefficient::monomial([0, 2], GaussianRational::from_int(4));
    for n in 0..=3 {
        let lhs = FunctionalDensity::new(substitute_one(&k.hamiltonians[n].density, Var::U, &miura));
        let rhs = &g.hamiltonians[n + 1].density + &g.hamiltonians[n].density.scale_coeff(&four_tau0_sq);
        if !same(&lhs, &FunctionalDensity::new(rhs)) {
            return Err(format!("H{n}(w′ + 2τ₀w + w²) ≢ H^G_{} + 4τ₀²H^G_{n}", n + 1));
        }
        kdv_from_gardner_limit(n, &g, &k).map_err(|e| e.to_string())?;
    }
    Ok("Miura pullback identity and Gardner → KdV limit exact for N ≤ 3".into())
}

fn criterion_5() -> Outcome {
    let t = akns_table(9).map_err(|e| e.to_string())?;
    let res = complex_kdv_beta_residuals(&t);
    let upto3: Vec<_> = res.iter().filter(|(n, _)| (1..=3).contains(n)).collect();
    if upto3.len() != 3 || upto3.iter().any(|(_, r)| !r.is_zero()) {
        return Err("β‴ − 4uβ′ − 2u′β = −β′_{2n+1} fails".into());
    }
    let lit = complex_kdv_beta_residuals_underived(&t);
    let lit_fails = lit.iter().filter(|(n, _)| (1..=3).contains(n)).all(|(_, r)| !r.is_zero());
    ok_if(
        lit_fails,
        "β_{2n−1}‴ − 4uβ′_{2n−1} − 2u′β_{2n−1} = −β′_{2n+1} exact for n ≤ 3; the form with −β_{2n+1} fails for every n ≤ 3".into(),
    )
}

fn criterion_6() -> Outcome {
    let opts = OdeOptions::tight();
    let mut worst = 0.0f64;
    for pot in ["sech:a=0.5", "gaussian:a=0.5", "twobump:a=0.5"] {
        let u = PotentialSpec::parse(pot).unwrap().on_line(2048, 1e-12).map_err(|e| e.to_string())?;
        for z in ["2i", "1+2i", "4i"] {
            let z = SpectralPoint::parse(z).unwrap();
            let t = generating_function_kdv(&u, z, &opts).map_err(|e| e.to_string())?.via_log_t;
            let d = fredholm_log_det2(&u, z, 2048).map_err(|e| e.to_string())?;
            let diff = (C64::new(0.0, 1.0) * z.z * d.log_det2 + t).norm();
            if diff >= 1e-6 {
                return Err(format!("{pot} at z = {}: |iz log det₂ + 𝒯₋₁| = {diff:.2e}", z.z));
            }
            worst = worst.max(diff);
        }
    }
    Ok(format!("max |iz log det₂ + 𝒯₋₁| = {worst:.2e} over 9 cases (grid 2048, one Richardson step)"))
}

fn criterion_7() -> Outcome {
    let opts = OdeOptions::tight();
    let kdv = lenard_sequence(2).unwrap();
    let u = PotentialSpec::parse("sech:a=0.5").unwrap().on_line(4001, 1e-13).unwrap();
    let mut slopes = Vec::new();
    for n in 0..=2 {
        let h = kdv_hamiltonian_value(n, &u, &kdv).map_err(|e| e.to_string())?;
        let pts: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0, 32.0]
            .iter()
            .map(|&tau| {
                let a = approximate_hamiltonian(n, tau, &u, &kdv, &opts).unwrap();
                (tau.ln(), (a - h).norm().ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        slopes.push(slope);
    }
    ok_if(
        slopes.iter().all(|s| (s + 2.0).abs() <= 0.3),
        format!("slopes for N = 0, 1, 2: {:.3}, {:.3}, {:.3} (H⁻¹-scale estimates not attempted)", slopes[0], slopes[1], slopes[2]),
    )
}

fn criterion_8() -> Outcome {
    let opts = OdeOptions::tight();
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY);
    let mut cases = 0;
    for pot in ["sech:a=0.3", "sech:a=-0.4", "gaussian:a=0.4", "bump:a=0.5", "twobump:a=0.3"] {
        let w = PotentialSpec::parse(pot).unwrap().on_line(2001, 1e-15).unwrap();
        for tau in [1.0, 2.0, 4.0] {
            let back = miura_inverse(&miura_forward(&w, tau), tau, &opts).map_err(|e| format!("{pot}, τ = {tau}: {e}"))?;
            let gv = diagonal_green_and_v(&w, tau, &opts).map_err(|e| format!("{pot}, τ = {tau}: {e}"))?;
            let beta_again = gv.v.map(|v| 1.0 / (2.0 * tau * (1.0 + v)));
            let e_beta = beta_again.max_abs_diff(&gv.beta).unwrap();
            let e_w = w_from_v(&gv.v, tau).unwrap().max_abs_diff(&w).unwrap();
            let pos = gv.v.samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min);
            worst.0 = worst.0.max(back.max_abs_diff(&w).unwrap());
            worst.1 = worst.1.max(e_w.max(e_beta));
            worst.2 = worst.2.min(pos);
            cases += 1;
        }
    }
    ok_if(
        worst.0 < 1e-7 && worst.1 < 1e-7 && worst.2 > 0.0,
        format!("{cases} cases: Miura {:.2e}, β/v/W {:.2e}, min(1+v) {:.3}", worst.0, worst.1, worst.2),
    )
}

fn criterion_9(n: usize) -> Outcome {
    // at N = 2 the stiffer flow is run with smaller data, τ₀ and step
    let (tau0, amp, dt) = if n == 1 { (2.0, 1.0, 1e-4) } else { (0.5, 0.5, 2e-5) };
    let mut spec = FlowSpec::new(FlowFamily::Gardner, n);
    spec.tau0 = tau0;
    spec.dt = dt;
    spec.t_end = 1.0;
    spec.sample_every = spec.steps() / 20;
    let w0 = GridFunction::from_real_fn(spec.geometry(), 256, |x| amp * (0.3 * x.cos() + 0.1 * (2.0 * x).cos())).unwrap();
    let it = intertwining_check(&spec, &w0, tau0).map_err(|e| e.to_string())?;
    let rep = conservation_report(&it.gardner, &gardner_hamiltonian_list(3).unwrap()).unwrap();
    let l2 = rep.max_relative_drift("L2").unwrap();
    let hm = (0..=3).map(|m| rep.max_relative_drift(&format!("H{m}")).unwrap()).fold(0.0, f64::max);
    let mi = it.series.max_residual("miura").unwrap();
    let wm = it.series.max_residual("w_map").unwrap();
    let pos = it.series.residuals["min_1_plus_v"].iter().copied().fold(f64::INFINITY, f64::min);

    let (fdt, fend) = if n == 1 { (1.25e-4, 0.2) } else { (2.5e-6, 0.0025) };
    let mut fs = spec.clone();
    fs.dt = fdt;
    fs.t_end = fend;
    fs.sample_every = 1;
    let traj = evolve(&fs, &w0).map_err(|e| e.to_string())?;
    let flux = gardner_hamiltonians(n).unwrap().fluxes[n].clone();
    let study = flux_order_study(&traj, &flux, &[8, 4, 2, 1]).map_err(|e| e.to_string())?;
    let order = study.observed_order;
    ok_if(
        l2 < 1e-10 && hm < 1e-6 && mi < 1e-6 && wm < 1e-6 && pos > 0.0 && (order - 4.0).abs() < 0.3,
        format!(
            "N = {n} (τ₀ = {tau0}, dt = {dt}): L² {l2:.1e}, max H_m {hm:.1e}, Miura {mi:.1e}, W-map {wm:.1e}, min(1+v) {pos:.2}, flux order {order:.2}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let u = GridFunction::from_real_fn(Geometry::Line { a: -40.0, b: 40.0 }, 4001, |x| {
        0.5 / x.cosh().powi(2) + 0.3 * (-(x - 1.5) * (x - 1.5) / 0.49).exp()
    })
    .unwrap();
    let p = tau_flow_conservation_probe(&u, 2.0, 3.0, 1e-4, &OdeOptions::tight()).map_err(|e| e.to_string())?;
    let d = p.derivative.norm();
    ok_if(d < 1e-6, format!("|d𝒯₋₁(3i)/dt| along the τ = 2 flow = {d:.2e} (𝒯₋₁ = {:.6})", p.value.re))
}

#[test]
fn acceptance_criteria() {
    let s = |x| Some(Duration::from_secs(x));
    let results = [
        report(1, "tabulated hierarchy entries", s(10), criterion_1),
        report(2, "Lenard recursion and leading terms", s(30), criterion_2),
        report(3, "Poisson commutation", s(120), criterion_3),
        report(4, "Miura identity and Gardner limit", None, criterion_4),
        report(5, "complex-KdV β recursion", None, criterion_5),
        report(6, "det₂ vs Jost cross-route", s(120), criterion_6),
        report(7, "asymptotic remainder slopes", None, criterion_7),
        report(8, "map triangle round trips", None, criterion_8),
        report(9, "Gardner N = 1 flow diagnostics", s(180), || criterion_9(1)),
        report(9, "Gardner N = 2 flow diagnostics", s(180), || criterion_9(2)),
        report(10, "τ-flow conservation probe", None, criterion_10),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    assert_eq!(failed, 0, "{failed} acceptance lines failed");
}
