//! Willmore-type energies of radial functions and the one-step functional
//! `F(r) = ω_d |supp r| + (α_d² / 2τ) (∫ |r^d - r_0^d|)²`.

use crate::error::{domain, Result};
use crate::profiles::{power_gap, DimensionalConstants, Extended, RadiusProfile};
use crate::quadrature::{adaptive_simpson, QuadConfig, Quadrature};
use crate::Error;

/// Curvature exponent, time step and dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    pub p: f64,
    pub tau: f64,
    pub consts: DimensionalConstants,
}

impl EnergyParams {
    pub fn new(p: f64, tau: f64, consts: DimensionalConstants) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(domain(format!("curvature exponent must be positive, got {p}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(domain(format!("time step must be positive, got {tau}")));
        }
        Ok(EnergyParams { p, tau, consts })
    }

    /// Parameters of the scale-invariant energy, `p = d - 1`.
    pub fn scale_invariant(tau: f64, consts: DimensionalConstants) -> Result<Self> {
        EnergyParams::new((consts.d - 1) as f64, tau, consts)
    }

    pub fn is_scale_invariant(&self) -> bool {
        self.p == (self.consts.d - 1) as f64
    }

    /// Exponent `d - 1 - p` of the radius in the level-set energy.
    pub fn radius_exponent(&self) -> f64 {
        (self.consts.d - 1) as f64 - self.p
    }

    /// `p* = |d - 1 - p|` when `d - 1 - p < 0`, else `1`.
    pub fn p_star(&self) -> f64 {
        p_star(self.consts.d, self.p)
    }
}

pub fn p_star(d: usize, p: f64) -> f64 {
    let e = (d - 1) as f64 - p;
    if e < 0.0 {
        -e
    } else {
        1.0
    }
}

/// `ω_d ∫_0^a r(t)^{d-1-p} dt`, the sum of the sphere energies of the level sets.
///
/// For `p > 1` and for `p = d - 1` this is the relaxed energy; for other `p`
/// it is the formal level-set integral.
pub fn willmore_p(profile: &RadiusProfile, params: &EnergyParams) -> Result<Extended> {
    let e = params.radius_exponent();
    if e == 0.0 {
        return Ok(Extended::Finite(willmore_scale_invariant(profile, &params.consts)));
    }
    let integral = profile.integral_r_pow(e, 0.0, profile.support_length())?;
    Ok(integral.scale(params.consts.omega_d))
}

/// `ω_d · a`: every non-empty level set is a ball and costs exactly `ω_d`.
pub fn willmore_scale_invariant(profile: &RadiusProfile, consts: &DimensionalConstants) -> f64 {
    consts.omega_d * profile.support_length()
}

/// Evaluates `ω_d ∫_0^ρmax ρ^{d-1-p} |g'(ρ)| dρ` for the radial function `u(x) = g(|x|)`.
///
/// This is the direct radial form of `(d-1)^{-p} ∫ |∇u| |div(∇u/|∇u|)|^p`,
/// independent of the level-set route taken by [`willmore_p`]. `g` must be
/// non-increasing on `[0, support_radius]`.
pub fn willmore_direct_radial<G, DG>(g: G, dg: DG, support_radius: f64, params: &EnergyParams) -> Result<Extended>
where
    G: Fn(f64) -> f64,
    DG: Fn(f64) -> f64,
{
    if !(support_radius > 0.0) {
        return Err(domain("support radius must be positive"));
    }
    const CHECK: usize = 1000;
    let mut prev = g(0.0);
    for k in 1..=CHECK {
        let v = g(support_radius * k as f64 / CHECK as f64);
        if v > prev + 1e-12 * prev.abs().max(1.0) {
            return Err(domain(format!(
                "radial function increases near rho = {}",
                support_radius * k as f64 / CHECK as f64
            )));
        }
        prev = v;
    }
    let e = params.radius_exponent();
    let density = |rho: f64| {
        let slope = dg(rho).abs();
        if slope == 0.0 {
            0.0
        } else {
            rho.powf(e) * slope
        }
    };
    let cfg = QuadConfig::default();
    let q = if e < 0.0 {
        // Integrable only if |g'| vanishes at the origin fast enough; a slope
        // that stays away from zero there gives +inf for e <= -1.
        if e <= -1.0 && dg(1e-300).abs() > 0.0 {
            return Ok(Extended::PosInfinity);
        }
        // ρ = ρ₁ s^m flattens the origin singularity; only the first
        // sixteenth of the radius goes through it, so that a slope supported
        // away from the origin is not squeezed against s = 1.
        let m = if e > -1.0 { (2.0 / (1.0 + e)).ceil() } else { 1.0 };
        let split = support_radius / 16.0;
        let head = adaptive_simpson(
            |s: f64| {
                if s == 0.0 {
                    return 0.0;
                }
                density(split * s.powf(m)) * split * m * s.powf(m - 1.0)
            },
            0.0,
            1.0,
            cfg,
        );
        let tail = adaptive_simpson(density, split, support_radius, cfg);
        Quadrature {
            value: head.value + tail.value,
            error: head.error + tail.error,
            converged: head.converged && tail.converged,
        }
    } else {
        adaptive_simpson(density, 0.0, support_radius, cfg)
    };
    if !q.converged {
        return Err(Error::Numeric {
            message: "radial Willmore quadrature did not converge".into(),
            achieved: q.error,
        });
    }
    Ok(Extended::Finite(params.consts.omega_d * q.value))
}

/// `F(candidate)` relative to `base`: `ω_d |supp r| + (α_d²/2τ) (∫ |r^d - r_0^d|)²`.
///
/// The Willmore term is the scale-invariant one whatever `params.p` is.
pub fn functional_f(candidate: &RadiusProfile, base: &RadiusProfile, params: &EnergyParams) -> f64 {
    let c = &params.consts;
    let gap = power_gap(candidate, base, c.d as i32);
    willmore_scale_invariant(candidate, c) + c.alpha_d * c.alpha_d / (2.0 * params.tau) * gap * gap
}

/// `f'(λ) = ω_d - (α_d²/τ) r_0(λ)^d ∫_λ^{λ_n} r_0^d`, with the left-continuous `r_0(λ)`.
pub fn fprime(base: &RadiusProfile, lambda: f64, lambda_n: f64, params: &EnergyParams) -> Result<f64> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(domain(format!("level must be non-negative, got {lambda}")));
    }
    if lambda > lambda_n {
        return Err(domain(format!("level {lambda} above the previous level {lambda_n}")));
    }
    Ok(fprime_unchecked(base, lambda, lambda_n, params))
}

pub(crate) fn fprime_unchecked(base: &RadiusProfile, lambda: f64, lambda_n: f64, params: &EnergyParams) -> f64 {
    let c = &params.consts;
    let d = c.d as i32;
    let r = base.left(lambda);
    if r == 0.0 {
        return c.omega_d;
    }
    let mass = base
        .integral_r_pow(d as f64, lambda, lambda_n)
        .map(|v| v.to_f64())
        .unwrap_or(f64::NAN);
    c.omega_d - c.alpha_d * c.alpha_d / params.tau * r.powi(d) * mass
}
