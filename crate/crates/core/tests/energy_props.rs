mod common;

use common::*;
use erosion_core::energy::{fprime, willmore_direct_radial, willmore_p, willmore_scale_invariant, EnergyParams};
use erosion_core::{constants, RadiusProfile};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // u = g(|x|) with g the inverse of r(t) = s (apex - t)^e on the slope and
    // g = a on the plateau ρ < r(a-).
    #[test]
    fn coarea_matches_direct_radial(
        r_end in 0.4f64..1.0, ratio in 1.5f64..3.0, e in 0.3f64..2.0, a in 0.3f64..1.5,
        d in 2usize..5, p in 0.5f64..3.0,
    ) {
        let prof = power_profile(r_end, ratio, e, a);
        let apex = a / (1.0 - ratio.powf(-1.0 / e));
        let s = r_end / (apex - a).powf(e);
        let r0 = r_end * ratio;
        let g = move |rho: f64| {
            if rho <= r_end { a } else if rho >= r0 { 0.0 } else { apex - (rho / s).powf(1.0 / e) }
        };
        let dg = move |rho: f64| {
            if rho <= r_end || rho >= r0 { 0.0 } else { -(1.0 / (e * s)) * (rho / s).powf(1.0 / e - 1.0) }
        };
        let params = EnergyParams::new(p, 1.0, constants(d).unwrap()).unwrap();
        let level = willmore_p(&prof, &params).unwrap().to_f64();
        let direct = willmore_direct_radial(g, dg, r0, &params).unwrap().to_f64();
        prop_assert!((level - direct).abs() <= 1e-6 * level.abs(), "level {level} direct {direct}");
    }

    #[test]
    fn dilation_scaling(prof in any_profile(), d in 2usize..5, p in 0.0f64..4.0, which in 0usize..3) {
        let c = [0.5, 2.0, 10.0][which];
        let consts = constants(d).unwrap();
        let wide = prof.with_enclosing_radius(prof.enclosing_radius() * 10.0).unwrap();
        let scaled = wide.dilate(c).unwrap();
        let exact = EnergyParams::new((d - 1) as f64, 1.0, consts).unwrap();
        prop_assert_eq!(willmore_p(&scaled, &exact).unwrap(), willmore_p(&wide, &exact).unwrap());
        if (p - (d - 1) as f64).abs() > 1e-3 {
            let params = EnergyParams::new(p, 1.0, consts).unwrap();
            let base = willmore_p(&wide, &params).unwrap().to_f64();
            let dil = willmore_p(&scaled, &params).unwrap().to_f64();
            let expected = c.powf((d as f64) - 1.0 - p) * base;
            prop_assert!((dil - expected).abs() <= 1e-10 * expected.abs(), "{dil} vs {expected}");
        }
    }

    #[test]
    fn ball_indicator_has_sphere_energy(radius in 0.01f64..5.0, d in 2usize..8) {
        let c = constants(d).unwrap();
        let ball = RadiusProfile::ball(radius, 1.0, radius * 2.0).unwrap();
        prop_assert_eq!(willmore_scale_invariant(&ball, &c), c.omega_d);
    }

    #[test]
    fn fprime_increases(prof in any_profile(), d in 2usize..4, tau in 1e-3f64..1.0, frac in 0.2f64..=1.0) {
        let params = EnergyParams::scale_invariant(tau, constants(d).unwrap()).unwrap();
        let top = frac * prof.support_length();
        let mut prev = f64::NEG_INFINITY;
        for lambda in grid(0.0, top, 1000).into_iter().map(|l| l.min(top)) {
            let v = fprime(&prof, lambda, top, &params).unwrap();
            if lambda > 0.0 && prof.eval(lambda).unwrap() > 0.0 && lambda < top {
                prop_assert!(v > prev, "not strictly increasing at {lambda}");
            } else {
                prop_assert!(v >= prev);
            }
            prev = v;
        }
    }
}
