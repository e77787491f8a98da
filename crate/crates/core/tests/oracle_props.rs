
use erosion_core::oracles::{
    brute_force_minimizer, distribution_radialize, fidelity_comparison, truncation_dominance, BruteForceProblem,
    GridFunction, DEFAULT_BUDGET,
};
use erosion_core::scheme::{next_level, SchemeParams};
use erosion_core::{constants, RadiusProfile};
use proptest::prelude::*;

/// Grid values: zero or a height drawn from a few plateaus or a continuum.
fn grid_values(cells: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(
        prop_oneof![Just(0.0), Just(0.5), Just(1.0), 0.0f64..2.0],
        cells,
    )
}

fn base_indices() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..=10, 8).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

fn oracle_problem(base: Vec<usize>) -> BruteForceProblem {
    let grid = (0..=10).map(|i| i as f64 / 10.0).collect();
    BruteForceProblem::new(grid, 0.125, base, 2.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radialization_keeps_the_volume(values in grid_values(64 * 64)) {
        let c = constants(2).unwrap();
        let u = GridFunction::new(2, 64, 0.04, values, 2.0).unwrap();
        let r = distribution_radialize(&u, &c).unwrap();
        let radial = c.alpha_d * r.integral_r_pow(2.0, 0.0, r.support_length()).unwrap().to_f64();
        prop_assert!((radial - u.l1_norm()).abs() <= 1e-12 * u.l1_norm().max(1.0));
    }

    #[test]
    fn radialization_keeps_the_volume_in_3d(values in grid_values(12 * 12 * 12)) {
        let c = constants(3).unwrap();
        let u = GridFunction::new(3, 12, 0.1, values, 2.0).unwrap();
        let r = distribution_radialize(&u, &c).unwrap();
        let radial = c.alpha_d * r.integral_r_pow(3.0, 0.0, r.support_length()).unwrap().to_f64();
        prop_assert!((radial - u.l1_norm()).abs() <= 1e-12 * u.l1_norm().max(1.0));
    }

    #[test]
    fn radialization_does_not_increase_the_distance(values in grid_values(64 * 64), radius in 0.2f64..1.2) {
        let c = constants(2).unwrap();
        let u = GridFunction::new(2, 64, 0.04, values, 2.0).unwrap();
        let target = RadiusProfile::ball(radius, 1.0, 2.0).unwrap();
        let f = fidelity_comparison(&u, &target, &c).unwrap();
        prop_assert!(f.d_after <= f.d_before + 1e-12 * f.d_before.max(1.0), "{f:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn truncations_dominate(base in base_indices(), log_tau in -4.0f64..1.0) {
        let c = constants(2).unwrap();
        let problem = oracle_problem(base);
        let tau = 10f64.powf(log_tau);
        prop_assert_eq!(truncation_dominance(&problem, tau, &c, 1e-9), None);
    }

    #[test]
    fn oracle_agrees_with_the_scheme(base in base_indices(), log_tau in -4.0f64..1.0) {
        let c = constants(2).unwrap();
        let problem = oracle_problem(base);
        let tau = 10f64.powf(log_tau);
        let bf = brute_force_minimizer(&problem, tau, &c, DEFAULT_BUDGET).unwrap();
        prop_assert!(bf.is_truncation());
        let profile = problem.base_profile().unwrap();
        let params = SchemeParams::for_profile(tau, &profile, &c).unwrap();
        let level = next_level(&profile, profile.support_length(), &params, &c).unwrap();
        let argmin = bf.argmin.support_levels() as f64 * problem.dt;
        prop_assert!((argmin - level).abs() <= problem.dt, "argmin {argmin}, scheme {level}");
    }
}
