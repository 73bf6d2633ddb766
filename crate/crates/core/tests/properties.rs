use proptest::prelude::*;
use sombrero::iteration::solve_model;
use sombrero::numerics::grid::weighted_integral;
use sombrero::{build_grid, build_trial, GridSpec, ModelParams, SolveOptions, TrialConfig};

fn params() -> impl Strategy<Value = ModelParams> {
    (1u32..=6, 0.5f64..2.0, 0.5f64..3.0).prop_map(|(n, g, a)| ModelParams::new(n, g, a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_invariants(p in params(), density in 64.0f64..160.0) {
        let spec = GridSpec { points_per_unit: density, ..GridSpec::default() };
        let grid = build_grid(&p, &spec).unwrap();
        let nodes = grid.nodes();
        prop_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(nodes[0] > 0.0);
        prop_assert_eq!(*nodes.last().unwrap(), grid.r_max());
        prop_assert!(grid.weights().iter().all(|&w| w > 0.0));
        let two_k = 2.0 * p.k();
        let sum: f64 = nodes.iter().zip(grid.weights()).map(|(r, w)| w * r.powf(two_k)).sum();
        let exact = grid.r_max().powf(two_k + 1.0) / (two_k + 1.0);
        prop_assert!(((sum - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn weighted_integral_is_linear(p in params(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let grid = build_grid(&p, &GridSpec { points_per_unit: 64.0, ..GridSpec::default() }).unwrap();
        let lw: Vec<f64> = grid.nodes().iter().map(|r| -p.g() * r.powi(4) + 2.0 * p.k() * r.ln()).collect();
        let f: Vec<f64> = grid.nodes().iter().map(|r| (3.0 * r).cos()).collect();
        let h: Vec<f64> = grid.nodes().iter().map(|r| r * r).collect();
        let mix: Vec<f64> = f.iter().zip(&h).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = weighted_integral(&mix, &grid, &lw).unwrap();
        let rhs = alpha * weighted_integral(&f, &grid, &lw).unwrap() + beta * weighted_integral(&h, &grid, &lw).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs()).max(1e-3));
    }

    #[test]
    fn trial_is_smooth_at_origin_and_r0(p in params(), a in 0.5f64..5.0) {
        let Ok(tf) = build_trial(TrialConfig::new(p, a).unwrap()) else { return Ok(()) };
        let r0 = p.r0();
        prop_assert!((tf.log_phi(r0 - 1e-10) - tf.log_phi(r0)).abs() < 1e-8);
        let eps = 1e-5;
        let phi = |r: f64| tf.log_phi(r).exp();
        let slope = (-3.0 * phi(0.0) + 4.0 * phi(eps) - phi(2.0 * eps)) / (2.0 * eps);
        prop_assert!(slope.abs() <= 1e-6 * phi(0.0));
        for r in [1e-3, 0.5 * r0, r0, 2.0 * r0] {
            prop_assert!(tf.h(r).is_finite());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn converged_state_is_nodeless(g in 0.5f64..2.0, a_shape in 1.0f64..2.5) {
        let p = ModelParams::new(3, g, a_shape).unwrap();
        if let Ok(sol) = solve_model(p, 2.0, &GridSpec { points_per_unit: 64.0, ..GridSpec::default() }, &SolveOptions::default()) {
            prop_assert!(sol.psi.iter().all(|&v| v > 0.0));
            prop_assert!(sol.f.iter().all(|&v| v > 0.0));
            prop_assert_eq!(sol.psi[0], 1.0);
        }
    }
}
