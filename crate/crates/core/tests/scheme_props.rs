mod common;

use common::*;
use erosion_core::energy::{functional_f, EnergyParams};
use erosion_core::scheme::{interpolant_eval, run_scheme, step_bounds, stopping_bound, SchemeParams};
use erosion_core::{constants, DimensionalConstants, RadiusProfile};
use proptest::prelude::*;

fn positive_top() -> impl Strategy<Value = RadiusProfile> {
    prop_oneof![step_profile(), smooth_profile(), mixed_profile()]
}

/// Time steps giving between a handful and a few hundred scheme steps.
fn tau_for(base: &RadiusProfile, c: &DimensionalConstants, steps: f64) -> f64 {
    stopping_bound(base, c) / steps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn steps_respect_the_bounds(base in positive_top(), d in 2usize..4, steps in 5.0f64..200.0) {
        let c = constants(d).unwrap();
        let tau = tau_for(&base, &c, steps);
        let params = SchemeParams::for_profile(tau, &base, &c).unwrap();
        let path = run_scheme(&base, &params, &c).unwrap();
        prop_assert!(path.complete);
        let b = step_bounds(&base, tau, &c).unwrap();
        let slack = params.root_tol;
        for w in path.levels.windows(2).filter(|w| w[1] > 0.0) {
            let step = w[0] - w[1];
            prop_assert!(step >= b.lower - slack && step <= b.upper + slack, "step {step} outside [{}, {}]", b.lower, b.upper);
        }
        let allowed = (stopping_bound(&base, &c) / tau).ceil() as usize + 1;
        prop_assert!(path.vanish_step.unwrap() <= allowed);
    }

    #[test]
    fn interpolant_is_lipschitz(base in positive_top(), steps in 5.0f64..100.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let c = constants(2).unwrap();
        let tau = tau_for(&base, &c, steps);
        let params = SchemeParams::for_profile(tau, &base, &c).unwrap();
        let path = run_scheme(&base, &params, &c).unwrap();
        let end = path.end_time();
        let (s, t) = (s * end, t * end);
        let lip = c.speed_constant() / base.top_radius().powi(4);
        let gap = (interpolant_eval(&path, t) - interpolant_eval(&path, s)).abs();
        prop_assert!(gap <= lip * (t - s).abs() + params.root_tol);
    }

    #[test]
    fn refinement_is_cauchy(base in smooth_profile(), steps in 10.0f64..100.0) {
        let c = constants(2).unwrap();
        let tau = tau_for(&base, &c, steps);
        let coarse = run_scheme(&base, &SchemeParams::for_profile(tau, &base, &c).unwrap(), &c).unwrap();
        let fine = run_scheme(&base, &SchemeParams::for_profile(tau / 2.0, &base, &c).unwrap(), &c).unwrap();
        let bound = 2.0 * c.speed_constant() / base.top_radius().powi(4) * tau;
        for t in grid(0.0, coarse.end_time().max(fine.end_time()), 400) {
            let gap = (interpolant_eval(&coarse, t) - interpolant_eval(&fine, t)).abs();
            prop_assert!(gap <= bound, "gap {gap} at t = {t}, bound {bound}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn each_step_beats_sampled_truncations(base in positive_top(), d in 2usize..4, steps in 3.0f64..30.0) {
        let c = constants(d).unwrap();
        let tau = tau_for(&base, &c, steps);
        let path = run_scheme(&base, &SchemeParams::for_profile(tau, &base, &c).unwrap(), &c).unwrap();
        let params = EnergyParams::scale_invariant(tau, c).unwrap();
        for w in path.levels.windows(2).take(3) {
            let prev = base.truncate(w[0]);
            let chosen = functional_f(&base.truncate(w[1]), &prev, &params);
            for mu in grid(0.0, w[0], 1000) {
                let other = functional_f(&base.truncate(mu), &prev, &params);
                prop_assert!(chosen <= other + 1e-9, "F = {chosen} at {} but {other} at {mu}", w[1]);
            }
        }
    }
}
