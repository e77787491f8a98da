//! The discrete minimizing movement.
//!
//! Each step minimizes `F` over truncations of the base profile, so the
//! iterate is `truncate(base, λ_n)` and only the levels need to be stored.

use crate::energy::{fprime_unchecked, EnergyParams};
use crate::error::{domain, Result};
use crate::profiles::{DimensionalConstants, LevelValue, Provenance, RadiusProfile};
use crate::roots::sup_nonpositive;

/// Relative root tolerance used by [`SchemeParams::for_profile`].
pub const DEFAULT_RELATIVE_ROOT_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub tau: f64,
    /// Absolute tolerance on each level, in height units.
    pub root_tol: f64,
    pub max_steps: usize,
}

impl SchemeParams {
    pub fn new(tau: f64, root_tol: f64, max_steps: usize) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(domain(format!("time step must be positive, got {tau}")));
        }
        if !(root_tol > 0.0) {
            return Err(domain(format!("root tolerance must be positive, got {root_tol}")));
        }
        if max_steps == 0 {
            return Err(domain("max_steps must be at least 1"));
        }
        Ok(SchemeParams {
            tau,
            root_tol,
            max_steps,
        })
    }

    /// `root_tol = 1e-12 · a`, and enough steps to pass the stopping bound twice.
    pub fn for_profile(tau: f64, base: &RadiusProfile, consts: &DimensionalConstants) -> Result<Self> {
        let a = base.support_length();
        let root_tol = if a > 0.0 { DEFAULT_RELATIVE_ROOT_TOL * a } else { DEFAULT_RELATIVE_ROOT_TOL };
        let bound = stopping_bound(base, consts) / tau;
        let max_steps = if bound.is_finite() {
            (2.0 * bound.ceil() + 16.0).min(1e8) as usize
        } else {
            100_000_000
        };
        SchemeParams::new(tau, root_tol, max_steps)
    }
}

/// Level sequence of one scheme run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErosionPath {
    /// `levels[n] = λ_n`, starting from `λ_0 = a`.
    pub levels: Vec<f64>,
    pub tau: f64,
    /// First `n` with `λ_n = 0`.
    pub vanish_step: Option<usize>,
    /// False when `max_steps` ran out before extinction.
    pub complete: bool,
    /// Set when `r_0(a-) = 0`, where the step bounds do not apply.
    pub exploratory: bool,
}

impl ErosionPath {
    pub fn level_values(&self) -> Vec<LevelValue> {
        self.levels
            .iter()
            .enumerate()
            .map(|(n, &lambda)| LevelValue {
                lambda,
                provenance: if n == 0 { Provenance::Initial } else { Provenance::SchemeStep },
            })
            .collect()
    }

    /// `n τ` at the last stored level.
    pub fn end_time(&self) -> f64 {
        (self.levels.len() - 1) as f64 * self.tau
    }
}

fn energy_params(tau: f64, consts: &DimensionalConstants) -> Result<EnergyParams> {
    EnergyParams::scale_invariant(tau, *consts)
}

/// `λ_{n+1} = sup { s ∈ [0, λ_n] : f'(s) <= 0 }`, or `0` when `f'(0) > 0`.
pub fn next_level(base: &RadiusProfile, lambda_n: f64, params: &SchemeParams, consts: &DimensionalConstants) -> Result<f64> {
    let a = base.support_length();
    if !(0.0..=a).contains(&lambda_n) {
        return Err(domain(format!("level {lambda_n} outside [0, {a}]")));
    }
    if lambda_n == 0.0 {
        return Ok(0.0);
    }
    let ep = energy_params(params.tau, consts)?;
    let f = |s: f64| fprime_unchecked(base, s, lambda_n, &ep);
    if f(0.0) > 0.0 {
        return Ok(0.0);
    }
    sup_nonpositive(f, 0.0, lambda_n, params.root_tol, MAX_BISECTIONS)
}

/// Iterates [`next_level`] from `λ_0 = a` until extinction or `max_steps`.
pub fn run_scheme(base: &RadiusProfile, params: &SchemeParams, consts: &DimensionalConstants) -> Result<ErosionPath> {
    let exploratory = !base.is_zero() && base.top_radius() == 0.0;
    if exploratory {
        log::warn!("r0(a-) = 0: scheme runs without its step bounds");
    }
    let mut levels = vec![base.support_length()];
    let mut lambda = levels[0];
    let mut steps = 0;
    while lambda > 0.0 && steps < params.max_steps {
        lambda = next_level(base, lambda, params, consts)?;
        levels.push(lambda);
        steps += 1;
    }
    let vanish_step = levels.iter().position(|&l| l == 0.0);
    Ok(ErosionPath {
        complete: vanish_step.is_some(),
        vanish_step,
        levels,
        tau: params.tau,
        exploratory,
    })
}

/// The piecewise-affine interpolant `λ_τ(t)`.
///
/// Past the last stored level it returns `0` for a complete path and the last
/// level otherwise.
pub fn interpolant_eval(path: &ErosionPath, t: f64) -> f64 {
    let levels = &path.levels;
    let last = levels.len() - 1;
    if t <= 0.0 {
        return levels[0];
    }
    let x = t / path.tau;
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-12 * x.max(1.0) {
        let n = nearest as usize;
        return if n <= last { levels[n] } else { levels[last] };
    }
    let n = x.floor() as usize;
    if n >= last {
        return levels[last];
    }
    let s = x - n as f64;
    levels[n] + s * (levels[n + 1] - levels[n])
}

/// Bounds on a single step `λ_n - λ_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    pub lower: f64,
    /// `+inf` when `r_0(a-) = 0`.
    pub upper: f64,
    pub open_case: bool,
}

/// `ω τ / (r_0(0)^{2d} α²) <= λ_n - λ_{n+1} <= ω τ / (r_0(a-)^{2d} α²)`.
pub fn step_bounds(base: &RadiusProfile, tau: f64, consts: &DimensionalConstants) -> Result<StepBounds> {
    if base.is_zero() {
        return Err(domain("step bounds of the zero profile are undefined"));
    }
    let k = consts.speed_constant() * tau;
    let two_d = 2 * consts.d as i32;
    let lower = k / base.initial_radius().powi(two_d);
    let top = base.top_radius();
    if top == 0.0 {
        return Ok(StepBounds {
            lower,
            upper: f64::INFINITY,
            open_case: true,
        });
    }
    Ok(StepBounds {
        lower,
        upper: k / top.powi(two_d),
        open_case: false,
    })
}

/// `a · r_0(0)^{2d} · α² / ω`, a bound on the extinction time of the scheme.
pub fn stopping_bound(base: &RadiusProfile, consts: &DimensionalConstants) -> f64 {
    if base.is_zero() {
        return 0.0;
    }
    base.support_length() * base.initial_radius().powi(2 * consts.d as i32) / consts.speed_constant()
}
