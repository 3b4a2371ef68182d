use acsim_core::kernels::{apply_heat, apply_m_epsilon, leray_project, m_epsilon_symbol, relaxation_factor};
use acsim_core::spectral::{divergence, mean_integral};
use acsim_core::{Grid, SpectralVectorField};
use proptest::prelude::*;

fn grid(n: usize) -> Grid {
    Grid::new(n, 12.0, 8).unwrap()
}

fn field(n: usize, values: &[f64]) -> SpectralVectorField {
    let g = grid(n);
    let len = g.len();
    let samples: Vec<Vec<f64>> = (0..n).map(|d| values[d * len..(d + 1) * len].to_vec()).collect();
    SpectralVectorField::from_physical(&g, &samples).unwrap()
}

fn sample_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * 8usize.pow(n as u32))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn symbol_is_a_semigroup(
        xi in prop::collection::vec(-3.0f64..3.0, 3),
        t in 0.0f64..2.0,
        s in 0.0f64..2.0,
        eps in 0.05f64..5.0,
    ) {
        let a = m_epsilon_symbol(&xi, t, eps).unwrap();
        let b = m_epsilon_symbol(&xi, s, eps).unwrap();
        let ab = m_epsilon_symbol(&xi, t + s, eps).unwrap();
        prop_assert!((a * b - ab).abs().max() < 1e-13);
    }

    #[test]
    fn symbol_is_a_symmetric_contraction(
        xi in prop::collection::vec(-4.0f64..4.0, 2),
        t in 0.0f64..3.0,
        eps in 0.05f64..5.0,
    ) {
        let m = m_epsilon_symbol(&xi, t, eps).unwrap();
        prop_assert!((&m - m.transpose()).abs().max() <= 1e-16);
        let eig = m.symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|l| *l >= -1e-15 && *l <= 1.0 + 1e-15));
    }

    #[test]
    fn relaxation_factor_is_smooth_across_the_series_switch(r in 0.0f64..2e-4) {
        let exact = if r == 0.0 { 1.0 } else { -(-r).exp_m1() / r };
        prop_assert!((relaxation_factor(r) - exact).abs() < 1e-15);
    }

    #[test]
    fn solenoidal_fields_evolve_by_the_heat_flow(values in sample_values(2), t in 0.0f64..3.0, eps in 0.1f64..4.0) {
        let u = leray_project(&field(2, &values));
        let m = apply_m_epsilon(&u, t, eps).unwrap();
        let h = apply_heat(&u, t).unwrap();
        prop_assert!(m.max_abs_difference(&h) <= 1e-14 * u.max_abs_coefficient().max(1e-300));
    }

    #[test]
    fn propagation_keeps_the_mean_and_does_not_grow_energy(values in sample_values(3), t in 0.0f64..2.0, eps in 0.1f64..4.0) {
        let u = field(3, &values);
        let m = apply_m_epsilon(&u, t, eps).unwrap();
        for (a, b) in mean_integral(&u).iter().zip(mean_integral(&m)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(m.l2_squared() <= u.l2_squared() * (1.0 + 1e-14));
    }

    #[test]
    fn projection_is_idempotent_and_solenoidal(values in sample_values(2)) {
        let u = field(2, &values);
        let p = leray_project(&u);
        prop_assert!(leray_project(&p).max_abs_difference(&p) < 1e-15);
        prop_assert!(divergence(&p).coefficients().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn physical_samples_survive_a_round_trip(values in sample_values(2)) {
        let u = field(2, &values);
        let back = u.to_physical();
        let len = grid(2).len();
        for d in 0..2 {
            for i in 0..len {
                prop_assert!((back[d][i] - values[d * len + i]).abs() < 1e-14);
            }
        }
    }
}
