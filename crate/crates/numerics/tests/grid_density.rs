use hierarchylab_core::algebra::{parse_poly, Var};
use hierarchylab_numerics::density::{density_samples, evaluate_density};
use hierarchylab_numerics::grid::Spectral;
use hierarchylab_numerics::{Geometry, GridFunction, NumericsError, PotentialSpec, C64};
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn periodic(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_real_fn(Geometry::Periodic { period: 2.0 * PI }, n, f).unwrap()
}

#[test]
fn zero_field_integrates_to_zero() {
    let u = periodic(64, |_| 0.0);
    let v = evaluate_density(&parse_poly("u").unwrap(), &[(Var::U, &u)], ZERO, ZERO).unwrap();
    assert_eq!(v, ZERO);
}

#[test]
fn half_sine_squared_over_a_period() {
    // exact antiderivative: ∫₀^{2π} ½ sin² = [x/4 − sin 2x / 8]₀^{2π} = π/2
    let u = periodic(256, f64::sin);
    let v = evaluate_density(&parse_poly("1/2 u^2").unwrap(), &[(Var::U, &u)], ZERO, ZERO).unwrap();
    assert!((v.re - PI / 2.0).abs() < 1e-12, "{v}");
    assert!(v.im.abs() < 1e-14);
}

#[test]
fn akns_density_on_sech_line_data() {
    let q = PotentialSpec::parse("sech:a=1").unwrap().on_line(4001, 1e-13).unwrap();
    let v = evaluate_density(&parse_poly("2 q r").unwrap(), &[(Var::Q, &q), (Var::R, &q)], ZERO, ZERO).unwrap();
    assert!((v.re - 4.0).abs() < 1e-8, "{v}");
}

#[test]
fn trigonometric_closed_forms() {
    let u = periodic(128, |x| x.cos() + 0.5 * (2.0 * x).sin());
    let cases = [
        // ∫ u_x² = π(1 + 4·¼) = 2π
        ("u'^2", 2.0 * PI),
        // ∫ u² = π(1 + ¼)
        ("u^2", 1.25 * PI),
        // ∫ u_xx u = −∫ u_x²
        ("u'' u", -2.0 * PI),
        ("tau0 u'^2", 6.0 * PI),
    ];
    for (src, exact) in cases {
        let v = evaluate_density(&parse_poly(src).unwrap(), &[(Var::U, &u)], ZERO, C64::new(3.0, 0.0)).unwrap();
        assert!((v.re - exact).abs() < 1e-10, "{src}: {v} vs {exact}");
    }
}

#[test]
fn density_is_linear() {
    let u = periodic(128, |x| 0.3 * x.sin() + 0.2 * (3.0 * x).cos());
    let p = parse_poly("u'^2 + u^3").unwrap();
    let q = parse_poly("u u'' + 4 u^4").unwrap();
    let combo = parse_poly("2 (u'^2 + u^3) - 3 (u u'' + 4 u^4)").unwrap();
    let e = |p| evaluate_density(p, &[(Var::U, &u)], ZERO, ZERO).unwrap();
    assert!((e(&combo) - (2.0 * e(&p) - 3.0 * e(&q))).norm() < 1e-12);
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = periodic(64, f64::sin);
    let b = periodic(128, f64::sin);
    let err = evaluate_density(&parse_poly("q r").unwrap(), &[(Var::Q, &a), (Var::R, &b)], ZERO, ZERO).unwrap_err();
    assert!(matches!(err, NumericsError::GridMismatch(_)));
}

#[test]
fn s_requires_positive_one_plus_v() {
    let v = periodic(64, |x| 1.5 * x.sin());
    let err = evaluate_density(&parse_poly("s v'").unwrap(), &[(Var::V, &v)], ZERO, ZERO).unwrap_err();
    assert!(matches!(err, NumericsError::SingularS(_)));
    let v = periodic(64, |x| 0.5 * x.sin());
    let pts = density_samples(&parse_poly("s (1 + v)").unwrap(), &[(Var::V, &v)], ZERO, ZERO).unwrap();
    assert!(pts.samples().iter().all(|c| (c - 1.0).norm() < 1e-14));
}

#[test]
fn spectral_derivatives_are_exact_on_trig_polynomials() {
    let u = periodic(64, |x| (3.0 * x).sin());
    let d3 = u.derivative(3);
    let max = d3.xs().iter().zip(d3.samples()).map(|(x, c)| (c.re + 27.0 * (3.0 * x).cos()).abs()).fold(0.0, f64::max);
    assert!(max < 1e-10, "{max}");
}

#[test]
fn line_derivatives_reach_high_order() {
    let errs: Vec<f64> = [201usize, 401]
        .iter()
        .map(|&n| {
            let g = Geometry::Line { a: -10.0, b: 10.0 };
            let f = GridFunction::from_real_fn(g, n, |x| (-x * x).exp()).unwrap();
            let d = f.derivative(1);
            d.xs().iter().zip(d.samples()).map(|(x, c)| (c.re + 2.0 * x * (-x * x).exp()).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[1] < 1e-9, "{errs:?}");
    // at least eighth order on halving
    assert!(errs[0] / errs[1] > 2f64.powi(8), "{errs:?}");
}

#[test]
fn spectral_pad_and_truncate_round_trip() {
    let sp = Spectral::new(32, 2.0 * PI);
    // band-limited data; the Nyquist mode is dropped by design
    let f: Vec<C64> = (0..32)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / 32.0;
            C64::new((3.0 * x).sin() + 0.2 * (11.0 * x).cos(), 0.0)
        })
        .collect();
    let fh = sp.forward(&f);
    let back = sp.truncate(&sp.pad(&fh, 64));
    let err = fh.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn small_grids_are_rejected() {
    let err = GridFunction::from_real_fn(Geometry::Periodic { period: 1.0 }, 8, |_| 0.0).unwrap_err();
    assert_eq!(err, NumericsError::GridTooSmall(8));
}

#[test]
fn line_potentials_respect_the_tail_tolerance() {
    for spec in ["sech:a=0.5", "sech2:a=-2", "gaussian:a=0.3,l=2", "bump:a=0.5", "twobump:a=0.5"] {
        let u = PotentialSpec::parse(spec).unwrap().on_line(2001, 1e-12).unwrap();
        u.check_tail(1e-12).unwrap();
    }
    let u = PotentialSpec::parse("sech:a=1").unwrap().on_interval(-3.0, 3.0, 101).unwrap();
    assert!(matches!(u.check_tail(1e-12), Err(NumericsError::NonDecayingPotential { .. })));
}

#[test]
fn potential_specs_parse_and_canonicalize() {
    let p = PotentialSpec::parse("gaussian:a=0.3,c=1").unwrap();
    assert_eq!(p.canonical(), "gaussian:a=0.3,c=1,l=1");
    assert!(PotentialSpec::parse("nope:a=1").is_err());
    assert!(PotentialSpec::parse("sech:a").is_err());
    let f = PotentialSpec::parse("fourier:c1=0.3,c2=0.1").unwrap();
    assert!((f.value(0.0).unwrap() - 0.4).abs() < 1e-15);
}

#[test]
fn csv_potentials_load_and_validate() {
    let dir = std::env::temp_dir().join(format!("hl-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.csv");
    let mut text = String::from("x,re,im\n");
    for j in 0..64 {
        let x = -8.0 + 16.0 * j as f64 / 63.0;
        text.push_str(&format!("{x},{},0\n", 0.5 / x.cosh().powi(8)));
    }
    std::fs::write(&good, text).unwrap();
    let u = PotentialSpec::parse(&format!("csv:{}", good.display())).unwrap().on_line(0, 1e-3).unwrap();
    assert_eq!(u.len(), 64);
    assert!((u.samples()[0].re).abs() < 1e-3);

    let bad = dir.join("bad.csv");
    std::fs::write(&bad, (0..20).map(|j| format!("{},{}\n", (j * j) as f64, 0.0)).collect::<String>()).unwrap();
    assert!(PotentialSpec::parse(&format!("csv:{}", bad.display())).unwrap().on_line(0, 1e-3).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn line_derivatives_are_exact_on_polynomials_up_to_the_ends() {
    let g = Geometry::Line { a: -1.0, b: 2.0 };
    let f = GridFunction::from_real_fn(g, 31, |x| x.powi(7) - 3.0 * x * x + 1.0).unwrap();
    let d = f.derivative(1);
    let err = d.xs().iter().zip(d.samples()).map(|(x, c)| (c.re - (7.0 * x.powi(6) - 6.0 * x)).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
}
