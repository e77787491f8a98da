#![allow(dead_code)]

use erosion_core::{Piece, PieceKind, RadiusProfile};
use proptest::prelude::*;

/// Radii and widths of a step profile, radii sorted non-increasing.
pub fn steps(max_pieces: usize, r_lo: f64, r_hi: f64) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_pieces).prop_flat_map(move |n| {
        (
            proptest::collection::vec(r_lo..r_hi, n),
            proptest::collection::vec(0.1f64..1.0, n),
        )
            .prop_map(|(mut r, w)| {
                r.sort_by(|a, b| b.total_cmp(a));
                (r, w)
            })
    })
}

pub fn step_profile_from(radii: &[f64], widths: &[f64], enclosing_radius: f64) -> RadiusProfile {
    let mut t = 0.0;
    let pieces = radii
        .iter()
        .zip(widths)
        .map(|(&r, &w)| {
            let p = Piece::constant(t, t + w, r);
            t += w;
            p
        })
        .collect();
    RadiusProfile::new(pieces, enclosing_radius).unwrap()
}

/// Step profiles with radii in `[0.2, 1.5)`, enclosing radius 2.
pub fn step_profile() -> impl Strategy<Value = RadiusProfile> {
    steps(5, 0.2, 1.5).prop_map(|(r, w)| step_profile_from(&r, &w, 2.0))
}

/// `r(t) = s (apex - t)^e` on `[0, a)` with prescribed `r(a-)` and `r(0)/r(a-)`.
pub fn power_profile(r_end: f64, ratio: f64, e: f64, a: f64) -> RadiusProfile {
    let apex = a / (1.0 - ratio.powf(-1.0 / e));
    let s = r_end / (apex - a).powf(e);
    let r0 = r_end * ratio;
    RadiusProfile::new(
        vec![Piece::new(
            0.0,
            a,
            PieceKind::PowerOfLinear {
                scale: s,
                apex,
                exponent: e,
            },
        )],
        1.5 * r0 + 0.5,
    )
    .unwrap()
}

/// Continuous, strictly decreasing profiles with `r(a-)` in `[0.4, 1)`.
pub fn smooth_profile() -> impl Strategy<Value = RadiusProfile> {
    (0.4f64..1.0, 1.5f64..3.0, 0.3f64..2.0, 0.3f64..1.5).prop_map(|(r, q, e, a)| power_profile(r, q, e, a))
}

/// A power piece followed by a constant piece below its end value.
pub fn mixed_profile() -> impl Strategy<Value = RadiusProfile> {
    (smooth_profile(), 0.1f64..1.0, 0.2f64..1.0).prop_map(|(p, drop, w)| {
        let a = p.support_length();
        let end = p.eval(a).unwrap();
        let mut pieces = p.pieces().to_vec();
        pieces.push(Piece::constant(a, a + w, end * drop));
        RadiusProfile::new(pieces, p.enclosing_radius()).unwrap()
    })
}

pub fn any_profile() -> impl Strategy<Value = RadiusProfile> {
    prop_oneof![step_profile(), smooth_profile(), mixed_profile()]
}

/// `n + 1` evenly spaced points of `[lo, hi]`.
pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}
