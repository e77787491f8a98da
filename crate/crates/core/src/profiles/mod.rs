//! Radius profiles: the non-increasing function `r(t)` with `{u >= t} = B(0, r(t))`
//! that carries every radially non-increasing `u` handled by this crate.
//!
//! Profiles are left-continuous: [`RadiusProfile::eval`] returns `r(t-)` for
//! `t > 0`, `r(0+)` at zero, and `0` strictly above the support length `a`.
//! In particular `eval(a) = r(a-)`, the radius of the top superlevel set.

mod constants;
mod format;
mod piece;

pub use constants::{constants, DimensionalConstants};
pub use format::{parse_directives, parse_profile, Directive, ProfileFile};
pub use piece::{Piece, PieceKind};

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive_simpson, QuadConfig};

/// Points per piece used to validate monotonicity and positivity.
pub const VALIDATION_POINTS: usize = 4096;

/// Either a finite non-negative value or `+inf`.
///
/// Derived ordering places `PosInfinity` above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Extended {
    Finite(f64),
    PosInfinity,
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(*v),
            Extended::PosInfinity => None,
        }
    }

    /// The value as an `f64`, `+inf` included.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn scale(self, k: f64) -> Extended {
        match self {
            Extended::Finite(v) => Extended::Finite(k * v),
            Extended::PosInfinity => Extended::PosInfinity,
        }
    }
}

/// Where a level value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Initial,
    SchemeStep,
    OdeSample,
}

/// A truncation height `lambda` together with its origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelValue {
    pub lambda: f64,
    pub provenance: Provenance,
}

/// A jump `r(t-) > r(t+)` of a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

/// A validated non-increasing, compactly supported radius function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusProfile {
    pieces: Vec<Piece>,
    enclosing_radius: f64,
}

impl RadiusProfile {
    /// Builds a profile from pieces tiling `[0, a)`.
    pub fn new(pieces: Vec<Piece>, enclosing_radius: f64) -> Result<Self> {
        if !(enclosing_radius > 0.0 && enclosing_radius.is_finite()) {
            return Err(domain(format!("enclosing radius must be positive, got {enclosing_radius}")));
        }
        let profile = RadiusProfile {
            pieces,
            enclosing_radius,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// The profile of `u = 0`.
    pub fn zero(enclosing_radius: f64) -> Self {
        RadiusProfile {
            pieces: Vec::new(),
            enclosing_radius,
        }
    }

    /// Indicator of `B(0, radius)` scaled to height `height`.
    pub fn ball(radius: f64, height: f64, enclosing_radius: f64) -> Result<Self> {
        RadiusProfile::new(vec![Piece::constant(0.0, height, radius)], enclosing_radius)
    }

    /// Step profile with the given values on consecutive intervals of width `dt`.
    pub fn steps(values: &[f64], dt: f64, enclosing_radius: f64) -> Result<Self> {
        let pieces = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Piece::constant(i as f64 * dt, (i + 1) as f64 * dt, v))
            .collect();
        RadiusProfile::new(pieces, enclosing_radius)
    }

    fn validate(&self) -> Result<()> {
        let mut prev_end: Option<f64> = None;
        let mut expected_lo = 0.0;
        let last = self.pieces.len().saturating_sub(1);
        for (i, p) in self.pieces.iter().enumerate() {
            p.check_parameters()?;
            if p.lo != expected_lo {
                return Err(domain(format!(
                    "pieces must tile [0, a): piece {i} starts at {} instead of {expected_lo}",
                    p.lo
                )));
            }
            expected_lo = p.hi;
            let start = p.start_value();
            if let Some(end) = prev_end {
                if start > end + slack(end) {
                    return Err(domain(format!("profile increases across t = {}: {end} -> {start}", p.lo)));
                }
            }
            let samples = sample_piece(p);
            let mut prev = f64::INFINITY;
            for &(t, v) in &samples {
                if !v.is_finite() {
                    return Err(domain(format!("non-finite radius at t = {t}")));
                }
                if v > prev + slack(prev) {
                    return Err(domain(format!("profile increases near t = {t}")));
                }
                let at_support_end = i == last && t >= p.hi;
                if !(v > 0.0) && !at_support_end {
                    return Err(domain(format!("radius must be positive below the support end, r({t}) = {v}")));
                }
                prev = v;
            }
            prev_end = Some(p.end_value());
        }
        let r0 = self.pieces.first().map_or(0.0, Piece::start_value);
        if r0 >= self.enclosing_radius {
            return Err(domain(format!(
                "r(0) = {r0} must be below the enclosing radius {}",
                self.enclosing_radius
            )));
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn enclosing_radius(&self) -> f64 {
        self.enclosing_radius
    }

    pub fn with_enclosing_radius(&self, enclosing_radius: f64) -> Result<Self> {
        RadiusProfile::new(self.pieces.clone(), enclosing_radius)
    }

    /// Support length `a = |supp r|`.
    pub fn support_length(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.hi)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Index of the piece containing `t` in `(lo, hi]`, or piece 0 at `t = 0`.
    pub(crate) fn left_piece_index(&self, t: f64) -> Option<usize> {
        if self.pieces.is_empty() || t > self.support_length() {
            return None;
        }
        Some(self.pieces.partition_point(|p| p.hi < t).min(self.pieces.len() - 1))
    }

    /// Index of the piece containing `t` in `[lo, hi)`.
    pub(crate) fn right_piece_index(&self, t: f64) -> Option<usize> {
        if self.pieces.is_empty() || t >= self.support_length() {
            return None;
        }
        Some(self.pieces.partition_point(|p| p.hi <= t))
    }

    /// `r(t-)` for `t > 0` (`r(0+)` at zero); callers guarantee `t >= 0`.
    #[inline]
    pub(crate) fn left(&self, t: f64) -> f64 {
        self.left_piece_index(t).map_or(0.0, |i| self.pieces[i].value_at(t))
    }

    /// `r(t+)`; callers guarantee `t >= 0`.
    #[inline]
    pub(crate) fn right(&self, t: f64) -> f64 {
        self.right_piece_index(t).map_or(0.0, |i| self.pieces[i].value_at(t))
    }

    /// Left-continuous evaluation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_height(t)?;
        Ok(self.left(t))
    }

    pub fn left_limit(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }

    pub fn right_limit(&self, t: f64) -> Result<f64> {
        check_height(t)?;
        Ok(self.right(t))
    }

    /// `r(0+)`.
    pub fn initial_radius(&self) -> f64 {
        self.left(0.0)
    }

    /// `r(a-)`, zero for the zero profile.
    pub fn top_radius(&self) -> f64 {
        self.pieces.last().map_or(0.0, Piece::end_value)
    }

    /// All heights with `r(t-) > r(t+)`, the support end included.
    pub fn jump_set(&self) -> Vec<Jump> {
        let mut jumps = Vec::new();
        for w in self.pieces.windows(2) {
            let (left, right) = (w[0].end_value(), w[1].start_value());
            if left > right {
                jumps.push(Jump { t: w[0].hi, left, right });
            }
        }
        if let Some(p) = self.pieces.last() {
            let left = p.end_value();
            if left > 0.0 {
                jumps.push(Jump { t: p.hi, left, right: 0.0 });
            }
        }
        jumps
    }

    /// Piece boundaries and interior sampling nodes, sorted, from `0` to `a`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for p in &self.pieces {
            out.push(p.lo);
            out.extend(p.interior_nodes());
        }
        if let Some(p) = self.pieces.last() {
            out.push(p.hi);
        }
        out
    }

    /// `∫_lo^hi r(s)^e ds`, `+inf` when `e < 0` and `r` vanishes non-integrably.
    pub fn integral_r_pow(&self, e: f64, lo: f64, hi: f64) -> Result<Extended> {
        if !(lo <= hi) {
            return Err(domain(format!("integration bounds out of order: [{lo}, {hi}]")));
        }
        let (lo, hi) = (lo.max(0.0), hi.min(self.support_length()));
        if hi <= lo {
            return Ok(Extended::Finite(0.0));
        }
        let first = self.right_piece_index(lo).unwrap_or(0);
        let mut total = 0.0;
        for p in &self.pieces[first..] {
            if p.lo >= hi {
                break;
            }
            let (x0, x1) = (lo.max(p.lo), hi.min(p.hi));
            if x1 <= x0 {
                continue;
            }
            let part = match p.power_integral_closed(e, x0, x1) {
                Some(v) => v,
                None => piece_power_quadrature(p, e, x0, x1)?,
            };
            if part.is_infinite() {
                return Ok(Extended::PosInfinity);
            }
            total += part;
        }
        Ok(Extended::Finite(total))
    }

    /// Profile of `min(u, lambda)`: `r * 1_{t < lambda}`.
    ///
    /// Levels outside `[0, a]` are clamped; the flag reports whether that happened.
    pub fn truncate_flagged(&self, lambda: f64) -> (RadiusProfile, bool) {
        let a = self.support_length();
        let clamped = !(0.0..=a).contains(&lambda);
        if clamped {
            log::warn!("truncation level {lambda} clamped into [0, {a}]");
        }
        let level = if lambda.is_nan() { 0.0 } else { lambda.clamp(0.0, a) };
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.lo >= level {
                break;
            }
            if p.hi <= level {
                pieces.push(p.clone());
            } else {
                pieces.push(p.cut_at(level));
            }
        }
        (
            RadiusProfile {
                pieces,
                enclosing_radius: self.enclosing_radius,
            },
            clamped,
        )
    }

    pub fn truncate(&self, lambda: f64) -> RadiusProfile {
        self.truncate_flagged(lambda).0
    }

    /// Spatial dilation `r -> c r`; the height axis is untouched.
    pub fn dilate(&self, c: f64) -> Result<RadiusProfile> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("dilation factor must be positive, got {c}")));
        }
        let pieces: Vec<Piece> = self.pieces.iter().map(|p| p.scaled(c)).collect();
        let r0 = pieces.first().map_or(0.0, Piece::start_value);
        if r0 >= self.enclosing_radius {
            return Err(domain(format!(
                "dilated radius {r0} leaves the enclosing ball of radius {}",
                self.enclosing_radius
            )));
        }
        Ok(RadiusProfile {
            pieces,
            enclosing_radius: self.enclosing_radius,
        })
    }

    /// Value of the encoded function at distance `rho`: `sup { t : r(t) >= rho }`.
    pub fn height_at_radius(&self, rho: f64) -> f64 {
        let a = self.support_length();
        if a == 0.0 || self.left(0.0) < rho {
            return 0.0;
        }
        if self.left(a) >= rho {
            return a;
        }
        let (mut lo, mut hi) = (0.0, a);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.left(mid) >= rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// `α_d ∫ |r_u^d - r_v^d| dt`, the L¹ distance of the two encoded functions.
pub fn l1_distance(u: &RadiusProfile, v: &RadiusProfile, consts: &DimensionalConstants) -> f64 {
    consts.alpha_d * power_gap(u, v, consts.d as i32)
}

/// `∫ |r_u^d - r_v^d| dt` over the union of the supports.
pub(crate) fn power_gap(u: &RadiusProfile, v: &RadiusProfile, d: i32) -> f64 {
    let mut nodes = u.breakpoints();
    nodes.extend(v.breakpoints());
    nodes.sort_by(|a, b| a.total_cmp(b));
    nodes.dedup();
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_depth: 40,
    };
    let mut total = 0.0;
    let (mut iu, mut iv) = (0usize, 0usize);
    for w in nodes.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let mid = 0.5 * (x0 + x1);
        let pu = piece_covering(u, mid, &mut iu);
        let pv = piece_covering(v, mid, &mut iv);
        let part = match (pu, pv) {
            (None, None) => 0.0,
            (Some(p), None) | (None, Some(p)) => p
                .power_integral_closed(d as f64, x0, x1)
                .unwrap_or_else(|| {
                    adaptive_simpson(|t| p.value_at(t).powi(d), x0, x1, cfg).value
                }),
            (Some(p), Some(q)) => match (&p.kind, &q.kind) {
                (PieceKind::Constant(a), PieceKind::Constant(b)) => (a.powi(d) - b.powi(d)).abs() * (x1 - x0),
                _ => {
                    let f = |t: f64| (p.value_at(t).powi(d) - q.value_at(t).powi(d)).abs();
                    let q = adaptive_simpson(f, x0, x1, cfg);
                    if !q.converged {
                        log::warn!("L1 quadrature on [{x0}, {x1}] stopped at error {:e}", q.error);
                    }
                    q.value
                }
            },
        };
        total += part;
    }
    total
}

/// Piece of `profile` whose open interval contains `t`; `cursor` speeds up
/// the monotone sweep in [`power_gap`].
fn piece_covering<'a>(profile: &'a RadiusProfile, t: f64, cursor: &mut usize) -> Option<&'a Piece> {
    let pieces = &profile.pieces;
    while *cursor < pieces.len() && pieces[*cursor].hi <= t {
        *cursor += 1;
    }
    pieces.get(*cursor).filter(|p| p.lo <= t)
}

fn check_height(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(domain(format!("height must be non-negative, got {t}")));
    }
    Ok(())
}

fn slack(v: f64) -> f64 {
    1e-12 * v.abs().max(1e-300)
}

fn sample_piece(p: &Piece) -> Vec<(f64, f64)> {
    match &p.kind {
        PieceKind::Sampled { step, values } => {
            let mut out: Vec<(f64, f64)> = values
                .iter()
                .enumerate()
                .map(|(k, &v)| (p.lo + k as f64 * step, v))
                .take_while(|&(t, _)| t < p.hi)
                .collect();
            out.push((p.hi, p.end_value()));
            out
        }
        _ => {
            let n = VALIDATION_POINTS;
            (0..=n)
                .map(|k| {
                    let t = if k == n { p.hi } else { p.lo + (p.hi - p.lo) * k as f64 / n as f64 };
                    (t, p.value_at(t))
                })
                .collect()
        }
    }
}

/// Adaptive quadrature of `value^e` on one piece, with a power substitution
/// near a simple zero at the right end when `e < 0`.
fn piece_power_quadrature(p: &Piece, e: f64, x0: f64, x1: f64) -> Result<f64> {
    let cfg = QuadConfig::default();
    let end = p.value_at(x1);
    let q = if e < 0.0 && end <= 0.0 {
        if e <= -1.0 {
            return Ok(f64::INFINITY);
        }
        let m = (2.0 / (1.0 + e)).ceil();
        let len = x1 - x0;
        adaptive_simpson(
            |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                let t = x1 - len * s.powf(m);
                p.value_at(t).max(0.0).powf(e) * len * m * s.powf(m - 1.0)
            },
            0.0,
            1.0,
            cfg,
        )
    } else {
        adaptive_simpson(|t| p.value_at(t).max(0.0).powf(e), x0, x1, cfg)
    };
    if !q.converged {
        return Err(Error::Numeric {
            message: format!("quadrature of r^{e} on [{x0}, {x1}] did not converge"),
            achieved: q.error,
        });
    }
    Ok(q.value)
}
