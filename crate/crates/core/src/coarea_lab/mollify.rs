//! One-sided mollification `r̃_n(t) = ∫_0^1 r(t - s/n) ρ(s) ds` with
//! `ρ(s) = 140 s³ (1-s)³`, `r` extended by `R` below zero and by `0` above `b`.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::profiles::{Piece, RadiusProfile};
use crate::quadrature::gauss_legendre;

/// Grid intervals per unit of `n` in [`mollify`].
pub const GRID_PER_N: usize = 1 << 12;

/// Regularization index, tail exponent, extension value and `p*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollificationParams {
    pub n: usize,
    pub q: f64,
    pub big_r: f64,
    pub p_star: f64,
    /// Support length `b` of the base profile.
    pub b: f64,
}

impl MollificationParams {
    /// Validates the parameters against `base`, including the admissibility
    /// thresholds on `n`.
    pub fn new(base: &RadiusProfile, n: usize, q: f64, big_r: f64, p_star: f64) -> Result<Self> {
        if base.is_zero() {
            return Err(domain("the zero profile has nothing to regularize"));
        }
        if n == 0 {
            return Err(domain("regularization index must be positive"));
        }
        if !(p_star > 0.0 && p_star.is_finite()) {
            return Err(domain(format!("p* must be positive, got {p_star}")));
        }
        let q_max = 1f64.min(1.0 / (2.0 * p_star));
        if !(q > 0.0 && q < q_max) {
            return Err(domain(format!("tail exponent {q} outside (0, {q_max})")));
        }
        let r0 = base.initial_radius();
        let omega = base.enclosing_radius();
        if !(big_r > r0 && big_r < omega) {
            return Err(domain(format!("extension value {big_r} outside ({r0}, {omega})")));
        }
        let params = MollificationParams {
            n,
            q,
            big_r,
            p_star,
            b: base.support_length(),
        };
        let nf = n as f64;
        if big_r + 1.0 / nf >= omega {
            return Err(domain(format!(
                "n = {n} below threshold: R + 1/n = {} must stay below R0 = {omega}",
                big_r + 1.0 / nf
            )));
        }
        let (b_n, c_n, a_n) = (params.b_n(), params.c_n(), params.a_n());
        if !(c_n > b_n && c_n < b_n + 1.0 / nf) {
            // c_n > b_n  <=>  n^(1/(2 p* q) - 1) > (R/2)^(1/q)
            let threshold = (big_r / 2.0).powf(1.0 / q).powf(1.0 / (1.0 / (2.0 * p_star * q) - 1.0));
            return Err(domain(format!(
                "n = {n} below threshold: c_n = {c_n} must lie in (b_n, b_n + 1/n) = ({b_n}, {}); need n > {threshold}",
                b_n + 1.0 / nf
            )));
        }
        if !(a_n > 0.0 && a_n < 1.0 / nf) {
            return Err(domain(format!("n = {n} below threshold: a_n = {a_n} must lie in (0, 1/n)")));
        }
        Ok(params)
    }

    /// `q = min(1, 1/(2p*)) / 2`.
    pub fn default_q(p_star: f64) -> f64 {
        0.5 * 1f64.min(1.0 / (2.0 * p_star))
    }

    /// `R = (r(0) + R0) / 2`.
    pub fn default_big_r(base: &RadiusProfile) -> f64 {
        0.5 * (base.initial_radius() + base.enclosing_radius())
    }

    /// `b + 1/n`.
    pub fn b_n(&self) -> f64 {
        self.b + 1.0 / self.n as f64
    }

    /// `b + 2/n - (R/2)^{1/q} n^{-1/(2 p* q)}`.
    pub fn c_n(&self) -> f64 {
        let nf = self.n as f64;
        self.b + 2.0 / nf - (self.big_r / 2.0).powf(1.0 / self.q) * nf.powf(-1.0 / (2.0 * self.p_star * self.q))
    }

    /// `(1/(2n))^{1/q}`.
    pub fn a_n(&self) -> f64 {
        (0.5 / self.n as f64).powf(1.0 / self.q)
    }

    /// `n^{-1/(2p*)}`.
    pub fn x(&self) -> f64 {
        (self.n as f64).powf(-1.0 / (2.0 * self.p_star))
    }

    /// End of the support of the regularized profile, `b + 2/n`.
    pub fn support_end(&self) -> f64 {
        self.b + 2.0 / self.n as f64
    }
}

pub fn rho(s: f64) -> f64 {
    let u = s * (1.0 - s);
    140.0 * u * u * u
}

pub fn rho_prime(s: f64) -> f64 {
    let u = s * (1.0 - s);
    420.0 * u * u * (1.0 - 2.0 * s)
}

pub fn rho_second(s: f64) -> f64 {
    let u = s * (1.0 - s);
    let v = 1.0 - 2.0 * s;
    420.0 * u * (2.0 * v * v - 2.0 * u)
}

/// Evaluator of `r̃_n` and its first two derivatives.
#[derive(Debug, Clone)]
pub struct Mollifier<'a> {
    base: &'a RadiusProfile,
    n: f64,
    big_r: f64,
    nodes: Vec<f64>,
}

impl<'a> Mollifier<'a> {
    pub fn new(base: &'a RadiusProfile, n: usize, big_r: f64) -> Self {
        Mollifier {
            base,
            n: n as f64,
            big_r,
            nodes: base.breakpoints(),
        }
    }

    fn extended(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.big_r
        } else {
            self.base.left(u)
        }
    }

    /// `∫_0^1 r(t - s/n) w(s) ds`, split where `t - s/n` crosses a breakpoint.
    fn convolve(&self, t: f64, w: impl Fn(f64) -> f64) -> f64 {
        let lo_u = t - 1.0 / self.n;
        let mut cuts = vec![0.0];
        let first = self.nodes.partition_point(|&x| x <= lo_u);
        let last = self.nodes.partition_point(|&x| x < t);
        for &x in self.nodes[first..last.max(first)].iter() {
            cuts.push(self.n * (t - x));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.push(1.0);
        cuts.dedup();
        let mut total = 0.0;
        for seg in cuts.windows(2) {
            let (s0, s1) = (seg[0], seg[1]);
            if s1 <= s0 {
                continue;
            }
            total += gauss_legendre(|s| self.extended(t - s / self.n) * w(s), s0, s1, 2);
        }
        total
    }

    pub fn value(&self, t: f64) -> f64 {
        if t >= self.base.support_length() + 1.0 / self.n {
            return 0.0;
        }
        if t <= 0.0 {
            return self.big_r;
        }
        self.convolve(t, rho)
    }

    pub fn first_derivative(&self, t: f64) -> f64 {
        if t >= self.base.support_length() + 1.0 / self.n || t <= 0.0 {
            return 0.0;
        }
        self.n * self.convolve(t, rho_prime)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        if t >= self.base.support_length() + 1.0 / self.n || t <= 0.0 {
            return 0.0;
        }
        self.n * self.n * self.convolve(t, rho_second)
    }
}

/// Samples `r̃_n` on `[0, b + 1/n]` with `2¹² n` intervals.
pub fn mollify(base: &RadiusProfile, params: &MollificationParams) -> Result<RadiusProfile> {
    let m = Mollifier::new(base, params.n, params.big_r);
    let end = params.b_n();
    let count = GRID_PER_N * params.n;
    let mut values: Vec<f64> = (0..=count)
        .into_par_iter()
        .map(|k| m.value(end * k as f64 / count as f64))
        .collect();
    values[count] = 0.0;
    RadiusProfile::new(vec![Piece::sampled(0.0, end, values)], base.enclosing_radius())
}
