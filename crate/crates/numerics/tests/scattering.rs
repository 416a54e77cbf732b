use hierarchylab_core::hierarchy::lenard_sequence;
use hierarchylab_numerics::det2::{fredholm_log_det2, kernel_trace, log_det2_by_eigenvalues, log_det2_native, log_det_identity_plus};
use hierarchylab_numerics::grid::Spectral;
use hierarchylab_numerics::ode::OdeOptions;
use hierarchylab_numerics::scattering::*;
use hierarchylab_numerics::{Geometry, GridFunction, NumericsError, PotentialSpec, C64};
use nalgebra::{DMatrix, SymmetricEigen};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn line(spec: &str) -> GridFunction {
    PotentialSpec::parse(spec).unwrap().on_line(4001, 1e-13).unwrap()
}

fn zero_line() -> GridFunction {
    GridFunction::zeros(Geometry::Line { a: -10.0, b: 10.0 }, 401).unwrap()
}

fn tight() -> OdeOptions {
    OdeOptions::tight()
}

/// Classical RK4 shooting of `ψ″ = (u − z²)ψ` from the left Jost data, returning `T = 1/a`
/// where `ψ ≈ a e^{−izx}` on the right.
fn shooting_transmission(u: impl Fn(f64) -> f64, z: C64, l: f64, steps: usize) -> C64 {
    let h = 2.0 * l / steps as f64;
    let f = |x: f64, y: [C64; 2]| [y[1], (u(x) - z * z) * y[0]];
    let mut x = -l;
    let mut y = [(-I * z * x).exp(), -I * z * (-I * z * x).exp()];
    for _ in 0..steps {
        let k1 = f(x, y);
        let k2 = f(x + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(x + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        x += h;
    }
    let a = (I * z * y[0] - y[1]) / (2.0 * I * z) * (I * z * x).exp();
    1.0 / a
}

#[test]
fn free_problem_has_unit_transmission() {
    let u = zero_line();
    for z in ["2i", "1+0.5i", "-3+4i"] {
        let z = SpectralPoint::parse(z).unwrap();
        let rec = jost_solutions(Problem::Schrodinger(&u), z, &tight()).unwrap();
        assert!((rec.t_renormalized - 1.0).norm() < 1e-12);
        let xs = u.xs();
        let m = &rec.jost_left[0];
        assert!(m.samples().iter().all(|c| (c - 1.0).norm() < 1e-12), "renormalized ψ_l e^{{izx}} ≡ 1");
        assert_eq!(xs.len(), m.len());
        assert!((transmission(Problem::Schrodinger(&u), z, &tight()).unwrap() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn reflectionless_well_matches_shooting_oracle() {
    let u = line("sech2:a=-2");
    let z = SpectralPoint::i_tau(2.0).unwrap();
    let rec = jost_solutions(Problem::Schrodinger(&u), z, &tight()).unwrap();
    // ten times finer than the grid spacing of `u`
    let steps = 10 * (u.len() - 1);
    let (a, b) = match u.geometry() {
        Geometry::Line { a, b } => (a, b),
        _ => unreachable!(),
    };
    assert!((a + b).abs() < 1e-12);
    let oracle = shooting_transmission(|x| -2.0 / x.cosh().powi(2), z.z, b, steps);
    assert!((rec.transmission - oracle).norm() < 1e-8, "{} vs {oracle}", rec.transmission);
    // reflectionless closed form (z + i)/(z − i) and ∫u = −4
    assert!((rec.transmission - 3.0).norm() < 1e-8);
    assert!((rec.t_renormalized - 3.0 / std::f64::consts::E).norm() < 1e-8);
    assert!(rec.wronskian_drift < 1e-8);
}

#[test]
fn akns_wronskian_is_constant() {
    let q = line("sech:a=1");
    let rec = jost_solutions(Problem::Akns { q: &q, r: &q }, SpectralPoint::i_tau(1.0).unwrap(), &tight()).unwrap();
    assert!(rec.wronskian_drift < 1e-8, "{}", rec.wronskian_drift);
    let t_r = rec.transmission * (-rec.integral / (2.0 * I * rec.z)).exp();
    assert!((t_r - rec.t_renormalized).norm() < 1e-12);
}

#[test]
fn transmission_has_a_simple_pole_at_the_bound_state() {
    let u = line("sech2:a=-2");
    let t: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|e| {
            let z = SpectralPoint::i_tau(1.0 + e).unwrap();
            jost_solutions(Problem::Schrodinger(&u), z, &tight()).unwrap().transmission.norm()
        })
        .collect();
    let (r1, r2) = (t[1] / t[0], t[2] / t[1]);
    assert!((r1 - 2.0).abs() < 0.06 && (r2 - 2.0).abs() < 0.03, "{r1} {r2}");
    // ratios approach 2 linearly in ε, so one Richardson step removes the leading defect
    let extrapolated = 2.0 * r2 - r1;
    assert!((extrapolated - 2.0).abs() < 2e-3, "{extrapolated}");
}

#[test]
fn at_an_eigenvalue_the_wronskian_vanishes() {
    let u = line("sech2:a=-2");
    let err = jost_solutions(Problem::Schrodinger(&u), SpectralPoint::i_tau(1.0).unwrap(), &tight()).unwrap_err();
    assert!(matches!(err, NumericsError::AtEigenvalue { .. }), "{err}");
}

#[test]
fn mkdv_transmission_equals_kdv_of_the_miura_image() {
    let v = line("sech:a=0.3");
    let z = SpectralPoint::i_tau(2.0).unwrap();
    let t_mkdv = transmission(Problem::Akns { q: &v, r: &v }, z, &tight()).unwrap();
    let dv = v.derivative(1);
    let u = v.zip_with(&dv, |a, d| d + a * a).unwrap();
    let rec = jost_solutions(Problem::Schrodinger(&u), z, &tight()).unwrap();
    assert!((t_mkdv - rec.transmission).norm() < 1e-8, "{t_mkdv} vs {}", rec.transmission);
}

#[test]
fn lower_half_plane_and_periodic_inputs_are_rejected() {
    assert!(matches!(SpectralPoint::parse("1-2i"), Err(NumericsError::LowerHalfPlane(_))));
    assert!(SpectralPoint::parse("3").is_err());
    let p = GridFunction::zeros(Geometry::Periodic { period: 6.0 }, 64).unwrap();
    let err = jost_solutions(Problem::Schrodinger(&p), SpectralPoint::i_tau(1.0).unwrap(), &tight()).unwrap_err();
    assert_eq!(err, NumericsError::PeriodicRejected);
    let cut = PotentialSpec::parse("sech:a=1").unwrap().on_interval(-4.0, 4.0, 201).unwrap();
    let err = jost_solutions(Problem::Schrodinger(&cut), SpectralPoint::i_tau(1.0).unwrap(), &tight()).unwrap_err();
    assert!(matches!(err, NumericsError::NonDecayingPotential { .. }));
}

#[test]
fn complex_literals_parse() {
    for (s, z) in [("2i", C64::new(0.0, 2.0)), ("1+2i", C64::new(1.0, 2.0)), ("-0.5-1.5i", C64::new(-0.5, -1.5)), ("1e-1+3i", C64::new(0.1, 3.0)), ("4", C64::new(4.0, 0.0))] {
        assert_eq!(parse_complex(s).unwrap(), z, "{s}");
    }
    assert!(parse_complex("i2x").is_err());
}

#[test]
fn miura_forward_matches_hand_formula() {
    let w = line("sech:a=1");
    let u = miura_forward(&w, 1.0);
    let err = u
        .xs()
        .iter()
        .zip(u.samples())
        .map(|(&x, c)| {
            let (s, t) = (1.0 / x.cosh(), x.tanh());
            (c.re - (-s * t + 2.0 * s + s * s)).abs()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
    assert!(miura_forward(&zero_line(), 3.0).sup_norm() == 0.0);
}

#[test]
fn miura_inverse_round_trip() {
    // w′ and 2τw widen the tail, so the seed is cut tighter than the gate
    let w = PotentialSpec::parse("sech:a=0.4").unwrap().on_line(4001, 1e-15).unwrap();
    let u = miura_forward(&w, 2.0);
    let back = miura_inverse(&u, 2.0, &tight()).unwrap();
    assert!(back.max_abs_diff(&w).unwrap() < 1e-7);
    assert!(riccati_residual(&back, &u, C64::new(0.0, 2.0)).unwrap() < 1e-7);
    assert!(miura_inverse(&zero_line(), 1.0, &tight()).unwrap().sup_norm() < 1e-14);
}

#[test]
fn miura_inverse_detects_deep_wells() {
    let u = line("sech2:a=-2");
    // dense second-order discretization of −∂² + u on a shorter box
    let (n, l) = (801usize, 20.0);
    let h = 2.0 * l / (n + 1) as f64;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let x = -l + (i + 1) as f64 * h;
        match i.abs_diff(j) {
            0 => 2.0 / (h * h) - 2.0 / x.cosh().powi(2),
            1 => -1.0 / (h * h),
            _ => 0.0,
        }
    });
    let ground = SymmetricEigen::new(m).eigenvalues.min();
    assert!((ground + 1.0).abs() < 1e-3, "{ground}");
    let tau = 0.5;
    assert!(ground < -tau * tau);
    let err = miura_inverse(&u, tau, &tight()).unwrap_err();
    assert!(matches!(err, NumericsError::NotInMiuraRange { .. }), "{err}");
    // above the threshold the inverse exists
    assert!(miura_inverse(&u, 1.5, &tight()).is_ok());
}

#[test]
fn riccati_shifted_recovers_w_at_its_own_point() {
    let w = line("sech:a=0.4");
    let src = miura_forward(&w, 1.0);
    let r = riccati_shifted(&src, SpectralPoint::i_tau(1.0).unwrap(), &tight()).unwrap();
    assert!(r.w.max_abs_diff(&w).unwrap() < 1e-8);
    let norms: Vec<f64> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&t| riccati_shifted(&src, SpectralPoint::i_tau(t).unwrap(), &tight()).unwrap().w.l2_norm())
        .collect();
    assert!(norms.windows(2).all(|p| p[1] < p[0]), "{norms:?}");
    let zero = riccati_shifted(&zero_line(), SpectralPoint::parse("1+2i").unwrap(), &tight()).unwrap();
    assert!(zero.w.sup_norm() < 1e-14);
}

#[test]
fn green_function_and_good_variable_triangle() {
    let w = line("sech:a=0.3");
    let gv = diagonal_green_and_v(&w, 1.0, &tight()).unwrap();
    assert!(gv.green_residual < 1e-7 && gv.good_variable_residual < 1e-7);
    assert!(gv.v.samples().iter().all(|c| 1.0 + c.re > 0.0));
    let back = w_from_v(&gv.v, 1.0).unwrap();
    assert!(back.max_abs_diff(&w).unwrap() < 1e-7);
    // forward/inverse leg of the triangle on the same data
    let u = miura_forward(&w, 1.0);
    assert!(miura_inverse(&u, 1.0, &tight()).unwrap().max_abs_diff(&w).unwrap() < 1e-7);

    let zero = diagonal_green_and_v(&zero_line(), 2.0, &tight()).unwrap();
    assert!(zero.beta.samples().iter().all(|b| (b - 0.25).norm() < 1e-14));
    assert!(zero.v.sup_norm() < 1e-14);
}

#[test]
fn generating_function_scales_quadratically() {
    let z = SpectralPoint::i_tau(2.0).unwrap();
    let a = generating_function_kdv(&line("sech:a=1e-3"), z, &tight()).unwrap();
    let b = generating_function_kdv(&line("sech:a=5e-4"), z, &tight()).unwrap();
    let ratio = (a.via_w / b.via_w).re;
    assert!((ratio - 4.0).abs() < 0.04, "{ratio}");
    assert!(a.discrepancy < 1e-6);
    let zero = generating_function_kdv(&zero_line(), z, &tight()).unwrap();
    assert_eq!(zero.via_w, C64::new(0.0, 0.0));
}

#[test]
fn gardner_generating_function_is_real_on_the_imaginary_axis() {
    let w = line("sech:a=0.4");
    for tau in [1.5, 2.0, 3.0] {
        let g = generating_function_gardner(&w, 1.0, SpectralPoint::i_tau(tau).unwrap(), &tight()).unwrap();
        assert!(g.via_w.im.abs() < 1e-12 && g.via_log_t.im.abs() < 1e-12, "{:?}", g);
        assert!(g.discrepancy < 1e-6);
    }
}

#[test]
fn remainders_reduce_and_decay() {
    let kdv = lenard_sequence(3).unwrap();
    let u = line("bump:a=0.5");
    let z = SpectralPoint::i_tau(2.0).unwrap();
    let t = generating_function_kdv(&u, z, &tight()).unwrap().via_w;
    assert_eq!(remainder_t_n(-1, z, &u, &kdv, &tight()).unwrap(), t);
    assert!(remainder_t_n(-2, z, &u, &kdv, &tight()).is_err());
    assert_eq!(remainder_t_n(2, z, &zero_line(), &kdv, &tight()).unwrap(), C64::new(0.0, 0.0));

    let h1 = kdv_hamiltonian_value(1, &u, &kdv).unwrap();
    let taus = [4.0f64, 8.0, 16.0, 32.0];
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .map(|&tau| {
            let e = (approximate_hamiltonian(1, tau, &u, &kdv, &tight()).unwrap() - h1).norm();
            (tau.ln(), e.ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 2.0).abs() < 0.3, "{slope}");
}

#[test]
fn tau_flow_linearizes_to_a_fourier_multiplier() {
    let eps = 1e-4;
    let tau = 1.0;
    let u = line(&format!("sech:a={eps}"));
    let field = tau_flow_vf(&u, tau, &tight()).unwrap();
    assert!(field.residual < 1e-7);
    // the data vanishes at both ends, so the open interval is one period
    let n = u.len() - 1;
    let sp = Spectral::new(n, n as f64 * u.dx());
    let oracle = sp.apply(&u.samples()[..n], |xi| C64::new(0.0, xi) / (4.0 * tau * tau + xi * xi));
    let num = (0..n).map(|j| (field.vector_field.samples()[j] - oracle[j]).norm()).fold(0.0, f64::max);
    let den = oracle.iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(num / den < 1e-2, "{}", num / den);
    assert!(tau_flow_vf(&zero_line(), tau, &tight()).unwrap().vector_field.sup_norm() < 1e-14);
}

#[test]
fn generating_functions_are_conserved_by_tau_flows() {
    let g = Geometry::Line { a: -40.0, b: 40.0 };
    let u = GridFunction::from_real_fn(g, 4001, |x| 0.5 / x.cosh().powi(2) + 0.3 * (-(x - 1.5).powi(2) / 0.49).exp()).unwrap();
    let dt = 1e-4;
    let probe = tau_flow_conservation_probe(&u, 2.0, 3.0, dt, &tight()).unwrap();
    assert!(probe.derivative.norm() < 1e-6, "{}", probe.derivative);
    // the same difference along a direction that is not a flow moves the value
    let z = SpectralPoint::i_tau(3.0).unwrap();
    let step = |s: f64| generating_function_kdv(&u.map(|c| c * (1.0 + s * dt)), z, &tight()).unwrap().via_w;
    let control = (step(1.0) - step(-1.0)) / (2.0 * dt);
    assert!(control.norm() > 1e-3, "{control}");
}

#[test]
fn det2_lu_matches_eigenvalues_on_small_grids() {
    let u = PotentialSpec::parse("sech:a=0.5").unwrap().on_line(161, 1e-6).unwrap();
    for z in ["2i", "1+2i"] {
        let z = SpectralPoint::parse(z).unwrap();
        let lu = log_det2_native(&u, z).unwrap();
        let eig = log_det2_by_eigenvalues(&u, z).unwrap();
        assert!((lu - eig).norm() < 1e-10, "{lu} vs {eig}");
    }
    let id = log_det_identity_plus(vec![C64::new(0.0, 0.0); 9], 3).unwrap();
    assert_eq!(id, C64::new(0.0, 0.0));
    let singular = vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)];
    assert_eq!(log_det_identity_plus(singular, 2).unwrap_err(), NumericsError::EigenvalueAtMinusOne);
}

#[test]
fn det2_first_trace_term() {
    let u = line("gaussian:a=0.3");
    let z = SpectralPoint::parse("1+2i").unwrap();
    let tr = kernel_trace(&u, z).unwrap();
    // diagonal of the free resolvent kernel is i/(2z)
    let expected = I / (2.0 * z.z) * u.integral();
    assert!((tr - expected).norm() < 1e-14);
}

#[test]
fn det2_agrees_with_the_jost_route() {
    let u = PotentialSpec::parse("sech:a=0.5").unwrap().on_line(1024, 1e-12).unwrap();
    let z = SpectralPoint::i_tau(2.0).unwrap();
    let d = fredholm_log_det2(&u, z, 1024).unwrap();
    let t = generating_function_kdv(&u, z, &tight()).unwrap().via_w;
    // iz log det₂ carries the opposite sign to the generating function
    assert!((I * z.z * d.log_det2 + t).norm() < 1e-6, "{} vs {t}", I * z.z * d.log_det2);
    assert!(fredholm_log_det2(&zero_line(), z, 64).unwrap().log_det2.norm() < 1e-15);
    let p = GridFunction::zeros(Geometry::Periodic { period: 6.0 }, 64).unwrap();
    assert_eq!(fredholm_log_det2(&p, z, 64).unwrap_err(), NumericsError::PeriodicRejected);
}
