use hierarchylab_core::hierarchy::gardner_hamiltonians;
use hierarchylab_numerics::flows::*;
use hierarchylab_numerics::{Geometry, GridFunction, NumericsError, C64};
use std::f64::consts::PI;

fn periodic(spec: &FlowSpec, f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_real_fn(spec.geometry(), spec.grid, f).unwrap()
}

#[test]
fn zero_data_is_a_fixed_point() {
    for fam in [FlowFamily::Gardner, FlowFamily::Kdv, FlowFamily::GoodVariable] {
        let mut spec = FlowSpec::new(fam, 1);
        spec.t_end = 0.01;
        let w0 = periodic(&spec, |_| 0.0);
        let traj = evolve(&spec, &w0).unwrap();
        assert!(traj.snapshots.iter().all(|s| s.sup_norm() == 0.0), "{}", fam.name());
    }
}

#[test]
fn small_kdv_data_follow_the_airy_flow() {
    let eps = 1e-6;
    let spec = FlowSpec::new(FlowFamily::Kdv, 1);
    let u0 = periodic(&spec, |x| eps * x.cos());
    let traj = evolve(&spec, &u0).unwrap();
    // u_t = −u‴ sends cos x to cos(x + t)
    let exact = periodic(&spec, |x| eps * (x + spec.t_end).cos());
    let rel = traj.last().max_abs_diff(&exact).unwrap() / eps;
    assert!(rel < 1e-4, "{rel}");
}

#[test]
fn gardner_l2_norm_is_conserved() {
    let spec = FlowSpec::new(FlowFamily::Gardner, 1);
    let w0 = periodic(&spec, |x| 0.5 * x.cos());
    let traj = evolve(&spec, &w0).unwrap();
    let report = conservation_report(&traj, &gardner_hamiltonian_list(3).unwrap()).unwrap();
    assert!(report.is_consistent());
    let l2 = report.max_relative_drift("L2").unwrap();
    assert!(l2 < 1e-10, "{l2}");
    assert!(report.max_relative_drift("H1").unwrap() < 1e-8);
    for m in ["H0", "H2", "H3"] {
        assert!(report.max_relative_drift(m).unwrap() < 1e-6, "{m}");
    }
}

#[test]
fn constant_fields_do_not_drift() {
    let mut spec = FlowSpec::new(FlowFamily::Gardner, 1);
    spec.t_end = 0.05;
    spec.sample_every = 50;
    let w0 = periodic(&spec, |_| 0.25);
    let traj = evolve(&spec, &w0).unwrap();
    let report = conservation_report(&traj, &gardner_hamiltonian_list(2).unwrap()).unwrap();
    for name in ["H0", "H1", "H2", "L2"] {
        assert_eq!(report.max_relative_drift(name).unwrap(), 0.0, "{name}");
    }
}

#[test]
fn flux_identity_on_constant_data() {
    let mut spec = FlowSpec::new(FlowFamily::Gardner, 1);
    spec.t_end = 0.01;
    spec.sample_every = 10;
    let traj = evolve(&spec, &periodic(&spec, |_| 0.4)).unwrap();
    let flux = gardner_hamiltonians(1).unwrap().fluxes[1].clone();
    let d = flux_residual(&traj, &flux).unwrap();
    assert!(d.max_residual("flux").unwrap() < 1e-12);
    assert!(d.max_residual("flux_mean").unwrap() < 1e-12);
}

#[test]
fn flux_differences_converge_at_fourth_order() {
    let mut spec = FlowSpec::new(FlowFamily::Gardner, 1);
    spec.dt = 1.25e-4;
    spec.t_end = 0.2;
    spec.sample_every = 1;
    let w0 = periodic(&spec, |x| 0.3 * x.cos() + 0.1 * (2.0 * x).cos());
    let traj = evolve(&spec, &w0).unwrap();
    let flux = gardner_hamiltonians(1).unwrap().fluxes[1].clone();
    let study = flux_order_study(&traj, &flux, &[8, 4, 2, 1]).unwrap();
    assert!((study.observed_order - 4.0).abs() < 0.3, "{study:?}");
    assert!(study.residuals.last().unwrap() < &1e-4);
}

#[test]
fn oversized_steps_are_refused() {
    let mut spec = FlowSpec::new(FlowFamily::Gardner, 2);
    spec.dt = 1e-2;
    let w0 = periodic(&spec, |x| 0.5 * x.cos());
    let err = Evolver::new(&spec, &w0).unwrap_err();
    assert!(matches!(err, NumericsError::StabilityViolation { .. }), "{err}");
}

#[test]
fn good_variable_flows_need_positive_data() {
    let spec = FlowSpec::new(FlowFamily::GoodVariable, 1);
    let v0 = periodic(&spec, |x| -0.99 + 0.01 * x.cos());
    let err = Evolver::new(&spec, &v0).unwrap_err();
    assert!(matches!(err, NumericsError::PositivityLost { .. }), "{err}");
}

#[test]
fn mismatched_initial_data_are_rejected() {
    let spec = FlowSpec::new(FlowFamily::Kdv, 1);
    let wrong = GridFunction::zeros(Geometry::Periodic { period: 2.0 * PI }, 128).unwrap();
    assert!(matches!(evolve(&spec, &wrong), Err(NumericsError::GridMismatch(_))));
    let mut odd = spec.clone();
    odd.grid = 255;
    assert!(matches!(odd_check(&odd), Err(NumericsError::Invalid(_))));
}

fn odd_check(spec: &FlowSpec) -> Result<Evolver, NumericsError> {
    let g = GridFunction::zeros(spec.geometry(), spec.grid).unwrap();
    Evolver::new(spec, &g)
}

#[test]
fn intertwining_on_zero_data() {
    let mut spec = FlowSpec::new(FlowFamily::Gardner, 1);
    spec.t_end = 0.01;
    let w0 = periodic(&spec, |_| 0.0);
    let it = intertwining_check(&spec, &w0, 2.0).unwrap();
    assert_eq!(it.series.max_residual("miura").unwrap(), 0.0);
    assert_eq!(it.series.max_residual("w_map").unwrap(), 0.0);
}

#[test]
fn diagnostics_serialize_to_csv() {
    let mut d = DiagnosticsSeries { times: vec![0.0, 0.5], ..Default::default() };
    d.conserved.insert("H0".into(), vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    d.residuals.insert("flux".into(), vec![0.0, 1e-9]);
    assert!(d.is_consistent());
    let csv = d.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,H0,flux");
    assert_eq!(lines.len(), 3);
    d.residuals.insert("bad".into(), vec![0.0]);
    assert!(!d.is_consistent());
}

#[test]
fn family_names_round_trip() {
    for fam in [FlowFamily::Kdv, FlowFamily::Gardner, FlowFamily::GoodVariable, FlowFamily::TauFlow] {
        assert_eq!(FlowFamily::from_name(fam.name()), Some(fam));
    }
    assert_eq!(FlowFamily::from_name("good-variable"), Some(FlowFamily::GoodVariable));
    assert_eq!(FlowFamily::from_name("nls"), None);
}

#[test]
fn tau_flow_on_a_large_box_keeps_its_mass() {
    let mut spec = FlowSpec::new(FlowFamily::TauFlow, 0);
    spec.tau = 1.0;
    spec.period = 40.0;
    spec.grid = 1024;
    spec.dt = 1e-2;
    spec.t_end = 0.2;
    spec.sample_every = 10;
    let u0 = periodic(&spec, |x| 0.3 / (x - 20.0).cosh().powi(2));
    let traj = evolve(&spec, &u0).unwrap();
    let report = conservation_report(&traj, &[]).unwrap();
    let drift = report.max_relative_drift("L2").unwrap();
    assert!(drift < 1e-6, "{drift}");
    assert!(traj.last().max_abs_diff(&u0).unwrap() > 1e-4, "the flow moves the data");
}
