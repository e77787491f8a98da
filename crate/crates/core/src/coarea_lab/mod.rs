//! Regularizing sequences for the coarea identity.
//!
//! From a profile `r` supported on `[0, b)`, [`build_regularized`] assembles
//! a C² strictly decreasing `r_n` supported on `[0, b + 2/n)`:
//!
//! | interval           | shape                                  |
//! |--------------------|----------------------------------------|
//! | `[0, a_n)`         | `θ(t) = R + 1/n - t^q`                 |
//! | `[a_n, 1/n)`       | reattachment bridge                    |
//! | `[1/n, b_n)`       | `R - h_n(t) (R - r̃_n(t))`, sampled     |
//! | `[b_n, c_n)`       | reattachment bridge                    |
//! | `[c_n, b + 2/n)`   | `η(t) = (b + 2/n - t)^q`               |
//!
//! with `h_n(t) = (1 - x)(1 - x + x t / b_n)` and `x = n^{-1/(2p*)}`.

mod mollify;
mod reattach;

pub use mollify::{mollify, rho, rho_prime, rho_second, MollificationParams, Mollifier, GRID_PER_N};
pub use reattach::{admissible_epsilon_bound, reattach, PolyPiece, Reattachment, ReattachmentSpec};

use rayon::prelude::*;

use crate::energy::{p_star, willmore_p, EnergyParams};
use crate::error::{domain, Result};
use crate::profiles::{l1_distance, DimensionalConstants, Piece, PieceKind, RadiusProfile};

fn h_n(params: &MollificationParams, t: f64) -> (f64, f64) {
    let x = params.x();
    let b_n = params.b_n();
    ((1.0 - x) * (1.0 - x + x * t / b_n), (1.0 - x) * x / b_n)
}

fn poly_pieces(pieces: Vec<PolyPiece>) -> impl Iterator<Item = Piece> {
    pieces
        .into_iter()
        .map(|p| Piece::new(p.lo, p.hi, PieceKind::Polynomial(p.poly.0)))
}

/// The regularized profile `r_n` described in the module documentation.
pub fn build_regularized(base: &RadiusProfile, params: &MollificationParams) -> Result<RadiusProfile> {
    let (n, q, big_r) = (params.n as f64, params.q, params.big_r);
    let (a_n, b_n, c_n, end) = (params.a_n(), params.b_n(), params.c_n(), params.support_end());
    let m = Mollifier::new(base, params.n, big_r);
    let x = params.x();
    let (_, dh) = h_n(params, 0.0);

    let count = GRID_PER_N * params.n;
    let start = 1.0 / n;
    let step = (b_n - start) / count as f64;
    let mut values: Vec<f64> = (0..=count)
        .into_par_iter()
        .map(|k| {
            let t = start + step * k as f64;
            let (h, _) = h_n(params, t);
            big_r - h * (big_r - m.value(t))
        })
        .collect();
    values[count] = big_r * x;

    // Data of r_n at 1/n: value, slope, curvature.
    let (r, r1, r2) = (m.value(start), m.first_derivative(start), m.second_derivative(start));
    let (h, _) = h_n(params, start);
    let right_of_head = [values[0], -dh * (big_r - r) + h * r1, 2.0 * dh * r1 + h * r2];
    let theta = |t: f64| [big_r + 1.0 / n - t.powf(q), -q * t.powf(q - 1.0), -q * (q - 1.0) * t.powf(q - 2.0)];
    let head = reattach::glue(a_n, start, theta(a_n), right_of_head)?;

    let left_of_tail = [big_r * x, -dh * big_r, 0.0];
    let s = end - c_n;
    let eta = [s.powf(q), -q * s.powf(q - 1.0), q * (q - 1.0) * s.powf(q - 2.0)];
    let tail = reattach::glue(b_n, c_n, left_of_tail, eta)?;

    let mut pieces = vec![Piece::new(
        0.0,
        a_n,
        PieceKind::OffsetMinusPower {
            offset: big_r + 1.0 / n,
            coeff: 1.0,
            origin: 0.0,
            exponent: q,
        },
    )];
    pieces.extend(poly_pieces(head));
    pieces.push(Piece::sampled(start, b_n, values));
    pieces.extend(poly_pieces(tail));
    pieces.push(Piece::new(
        c_n,
        end,
        PieceKind::PowerOfLinear {
            scale: 1.0,
            apex: end,
            exponent: q,
        },
    ));
    RadiusProfile::new(pieces, base.enclosing_radius())
}

/// Checks that `r` is strictly decreasing on `(0, a)`: at every breakpoint and
/// at eight points inside each piece.
pub fn check_regular(profile: &RadiusProfile) -> Result<()> {
    let mut samples = Vec::new();
    for p in profile.pieces() {
        for k in 0..8 {
            samples.push(p.lo + p.len() * k as f64 / 8.0);
        }
    }
    samples.extend(profile.breakpoints());
    samples.sort_by(f64::total_cmp);
    samples.dedup();
    let mut prev: Option<(f64, f64)> = None;
    for &t in samples.iter().filter(|&&t| t > 0.0 && t < profile.support_length()) {
        let v = profile.left(t);
        if let Some((pt, pv)) = prev {
            // Samples a few ulps apart may share a value.
            let coincident = t - pt <= 1e-12 * t.max(1.0);
            if v > pv || (v == pv && !coincident) {
                return Err(domain(format!("profile not strictly decreasing between {pt} and {t}")));
            }
        }
        prev = Some((t, v));
    }
    Ok(())
}

/// One row of [`coarea_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoareaRow {
    pub n: usize,
    pub q: f64,
    /// `W_p(v_n) = ω_d ∫ r_n^{d-1-p}`.
    pub energy: f64,
    /// `ω_d ∫ r^{d-1-p}` for the base profile.
    pub target: f64,
    pub rel_error: f64,
    /// `‖v_n - v‖_1`.
    pub l1_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoareaReport {
    pub rows: Vec<CoareaRow>,
    /// Whether the energy column decreases with `n`; only reported when `d - 1 - p < 0`.
    pub energy_monotone: Option<bool>,
}

/// Settings of a [`coarea_report`] run; `None` picks the defaults of
/// [`MollificationParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoareaSettings {
    pub ns: Vec<usize>,
    pub p: f64,
    pub q: Option<f64>,
    pub big_r: Option<f64>,
}

pub fn coarea_report(base: &RadiusProfile, settings: &CoareaSettings, consts: &DimensionalConstants) -> Result<CoareaReport> {
    if settings.ns.is_empty() {
        return Err(domain("coarea report needs at least one n"));
    }
    let energy = EnergyParams::new(settings.p, 1.0, *consts)?;
    let ps = p_star(consts.d, settings.p);
    let q = settings.q.unwrap_or_else(|| MollificationParams::default_q(ps));
    let big_r = settings.big_r.unwrap_or_else(|| MollificationParams::default_big_r(base));
    let target = willmore_p(base, &energy)?.to_f64();
    let rows = settings
        .ns
        .par_iter()
        .map(|&n| {
            let params = MollificationParams::new(base, n, q, big_r, ps)?;
            let reg = build_regularized(base, &params)?;
            let e = willmore_p(&reg, &energy)?.to_f64();
            Ok(CoareaRow {
                n,
                q,
                energy: e,
                target,
                rel_error: (e - target).abs() / target.abs(),
                l1_gap: l1_distance(&reg, base, consts),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let energy_monotone = if energy.radius_exponent() < 0.0 {
        let mut sorted = rows.clone();
        sorted.sort_by_key(|r| r.n);
        Some(sorted.windows(2).all(|w| w[1].energy <= w[0].energy))
    } else {
        None
    };
    Ok(CoareaReport { rows, energy_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::constants;

    fn linear() -> RadiusProfile {
        RadiusProfile::new(
            vec![Piece::new(
                0.0,
                1.0,
                PieceKind::PowerOfLinear {
                    scale: 1.0,
                    apex: 2.0,
                    exponent: 1.0,
                },
            )],
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn regularized_profile_hits_the_construction_values() {
        let base = linear();
        let params = MollificationParams::new(&base, 16, 0.25, 2.5, 1.0).unwrap();
        let reg = build_regularized(&base, &params).unwrap();
        let x = 0.25;
        assert!((reg.eval(params.b_n()).unwrap() - 2.5 * x).abs() < 1e-12);
        assert!((reg.eval(params.c_n()).unwrap() - 2.5 * x / 2.0).abs() < 1e-12);
        assert_eq!(reg.support_length(), params.support_end());
        check_regular(&reg).unwrap();
    }

    #[test]
    fn scale_invariant_report_is_exact() {
        let base = linear();
        let c = constants(2).unwrap();
        let settings = CoareaSettings {
            ns: vec![8, 16],
            p: 1.0,
            q: None,
            big_r: None,
        };
        let report = coarea_report(&base, &settings, &c).unwrap();
        for row in &report.rows {
            let gap = (row.energy - row.target).abs();
            assert!((gap - 2.0 * c.omega_d / row.n as f64).abs() < 1e-12);
        }
        assert_eq!(report.energy_monotone, None);
    }
}
