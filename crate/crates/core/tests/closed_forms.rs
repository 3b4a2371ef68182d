use std::f64::consts::PI;

use acsim_core::example3d::{t3_first_component, t3_first_component_tensor, t3_limit, xi_integral_closed_form};

/// `int_R exp(-lambda x^2) x^(2a) dx = Gamma(a + 1/2) / lambda^(a + 1/2)`.
fn moment(a: u32, lambda: f64) -> f64 {
    let gamma = match a {
        0 => 1.0,
        1 => 0.5,
        2 => 0.75,
        3 => 1.875,
        _ => unreachable!(),
    } * PI.sqrt();
    gamma / lambda.powf(a as f64 + 0.5)
}

/// Expands the integrand into monomials and integrates each exactly.
fn xi_integral_by_moments(lambda: f64, tau: f64) -> f64 {
    let m = |a: u32, b: u32| moment(a, lambda) * moment(b, lambda) * moment(0, lambda);
    (tau + 1.0) * (m(1, 2) + m(0, 3)) - 3.0 * m(1, 1) - m(0, 2)
}

#[test]
fn xi_integral_matches_gaussian_moments() {
    for lambda in [0.7, 2.0, 5.0, 10.0] {
        for tau in [0.0, 1.0, 2.0, 3.5] {
            let exact = xi_integral_by_moments(lambda, tau);
            let closed = xi_integral_closed_form(lambda, tau).unwrap();
            assert!((closed - exact).abs() <= 1e-13 * exact.abs().max(1e-300), "{lambda} {tau}");
        }
    }
}

#[test]
fn leading_term_grows_towards_its_limit() {
    let limit = t3_limit(1.0, 1e-13).unwrap().value;
    let mut prev = 0.0;
    for t in [0.5, 2.0, 8.0, 32.0] {
        let v = t3_first_component(t, 1.0, 1e-12).unwrap().value;
        let w = t3_first_component_tensor(t, 1.0, 40).unwrap();
        assert!(v > prev && v < limit);
        assert!((v - w).abs() <= 1e-8 * v);
        prev = v;
    }
    assert!(limit > 0.0 && (limit - prev) / limit < 0.1);
}
