use hierarchylab_core::algebra::{parse_poly, Var};
use hierarchylab_numerics::density::evaluate_density;
use hierarchylab_numerics::ode::OdeOptions;
use hierarchylab_numerics::periodic;
use hierarchylab_numerics::scattering::{miura_forward, miura_inverse, w_from_v};
use hierarchylab_numerics::{Geometry, GridFunction, PotentialSpec, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn trig(n: usize, a: &[f64], b: &[f64]) -> GridFunction {
    GridFunction::from_real_fn(Geometry::Periodic { period: 2.0 * PI }, n, |x| {
        a.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * x).cos()).sum::<f64>()
            + b.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * x).sin()).sum::<f64>()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn quadratic_densities_obey_parseval(a in prop::collection::vec(-1.0f64..1.0, 4), b in prop::collection::vec(-1.0f64..1.0, 4)) {
        let u = trig(128, &a, &b);
        let norm: f64 = a.iter().chain(&b).map(|c| c * c).sum::<f64>() * PI;
        let dnorm: f64 = a.iter().zip(&b).enumerate().map(|(k, (x, y))| ((k + 1) as f64).powi(2) * (x * x + y * y)).sum::<f64>() * PI;
        let v = evaluate_density(&parse_poly("u^2").unwrap(), &[(Var::U, &u)], ZERO, ZERO).unwrap();
        prop_assert!((v.re - norm).abs() < 1e-10);
        let d = evaluate_density(&parse_poly("u'^2").unwrap(), &[(Var::U, &u)], ZERO, ZERO).unwrap();
        prop_assert!((d.re - dnorm).abs() < 1e-10);
    }

    #[test]
    fn total_derivatives_integrate_to_zero(a in prop::collection::vec(-1.0f64..1.0, 3), b in prop::collection::vec(-1.0f64..1.0, 3)) {
        let u = trig(128, &a, &b);
        let v = evaluate_density(&parse_poly("d(u^3 u'' + u'^2)").unwrap(), &[(Var::U, &u)], ZERO, ZERO).unwrap();
        prop_assert!(v.norm() < 1e-10);
    }

    #[test]
    fn good_variable_inverts_on_the_circle(a in prop::collection::vec(-0.15f64..0.15, 3), tau in 1.0f64..3.0) {
        let w = trig(128, &a, &[]);
        let v = periodic::good_variable(&w, tau).unwrap();
        prop_assert!(v.samples().iter().all(|c| 1.0 + c.re > 0.0));
        let back = w_from_v(&v, tau).unwrap();
        prop_assert!(back.max_abs_diff(&w).unwrap() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn miura_round_trip_on_the_line(amp in -0.4f64..0.4, tau in 1.0f64..3.0) {
        let w = PotentialSpec::parse(&format!("sech:a={amp}")).unwrap().on_line(2001, 1e-15).unwrap();
        let u = miura_forward(&w, tau);
        let back = miura_inverse(&u, tau, &OdeOptions::tight()).unwrap();
        prop_assert!(back.max_abs_diff(&w).unwrap() < 1e-7);
    }
}
