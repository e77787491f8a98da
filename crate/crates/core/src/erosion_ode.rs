//! The limiting erosion law `λ' = -(ω_d/α_d²) / r_0(λ)^{2d}`.
//!
//! Integration runs piece by piece downward in `λ`. Constant pieces have
//! constant speed and are stepped exactly; other pieces use RK4 with step
//! doubling, and the crossing of the piece's lower end is located by bisection.

use crate::error::{domain, Error, Result};
use crate::profiles::{DimensionalConstants, Jump, LevelValue, Piece, PieceKind, Provenance, RadiusProfile};

/// Relative starting offsets of the exploratory runs.
pub const EXPLORATION_LADDER: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeParams {
    /// Local error tolerance per step, height units.
    pub step_tol: f64,
    /// Tolerance on the level at which a piece boundary is crossed.
    pub event_tol: f64,
    pub t_max: f64,
    /// Allows a start where `r_0(λ_0-) = 0`.
    pub exploratory: bool,
}

impl Default for OdeParams {
    fn default() -> Self {
        OdeParams {
            step_tol: 1e-10,
            event_tol: 1e-12,
            t_max: f64::INFINITY,
            exploratory: false,
        }
    }
}

impl OdeParams {
    fn check(&self) -> Result<()> {
        if !(self.step_tol > 0.0 && self.event_tol > 0.0 && self.t_max > 0.0) {
            return Err(domain("ODE tolerances and t_max must be positive"));
        }
        Ok(())
    }
}

/// `[-k / r(λ+)^{2d}, -k / r(λ-)^{2d}]`, degenerate where `r_0` is continuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedBracket {
    pub lower: f64,
    pub upper: f64,
    /// `r_0(λ-) = 0`.
    pub unbounded: bool,
}

impl SpeedBracket {
    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }
}

fn speed_from_radius(k: f64, r: f64, two_d: i32) -> f64 {
    if r == 0.0 {
        f64::NEG_INFINITY
    } else {
        -k / r.powi(two_d)
    }
}

pub fn erosion_speed(base: &RadiusProfile, lambda: f64, consts: &DimensionalConstants) -> Result<SpeedBracket> {
    let a = base.support_length();
    if !(lambda > 0.0 && lambda <= a) {
        return Err(domain(format!("level {lambda} outside (0, {a}]")));
    }
    let k = consts.speed_constant();
    let two_d = 2 * consts.d as i32;
    let (left, right) = (base.left_limit(lambda)?, base.right_limit(lambda)?);
    Ok(SpeedBracket {
        lower: speed_from_radius(k, right, two_d),
        upper: speed_from_radius(k, left, two_d),
        unbounded: left == 0.0,
    })
}

/// A jump of `r_0` passed by the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCrossing {
    pub t: f64,
    pub jump: Jump,
    pub bracket: SpeedBracket,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    t: f64,
    lambda: f64,
    speed: f64,
}

/// Sampled solution with cubic Hermite reconstruction between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    nodes: Vec<Node>,
    pub crossings: Vec<JumpCrossing>,
    /// Time at which `λ` reached zero.
    pub extinction: Option<f64>,
}

impl Trajectory {
    pub fn eval(&self, t: f64) -> f64 {
        let nodes = &self.nodes;
        if t <= nodes[0].t {
            return nodes[0].lambda;
        }
        let last = nodes[nodes.len() - 1];
        if t >= last.t {
            return last.lambda;
        }
        let i = nodes.partition_point(|n| n.t <= t) - 1;
        let (n0, n1) = (nodes[i], nodes[i + 1]);
        let h = n1.t - n0.t;
        let s = (t - n0.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let v = h00 * n0.lambda + h10 * h * n0.speed + h01 * n1.lambda + h11 * h * n1.speed;
        v.clamp(n1.lambda, n0.lambda)
    }

    pub fn end_time(&self) -> f64 {
        self.nodes[self.nodes.len() - 1].t
    }

    /// `(t, λ)` at every accepted step.
    pub fn samples(&self) -> impl Iterator<Item = LevelValue> + '_ {
        self.nodes.iter().map(|n| LevelValue {
            lambda: n.lambda,
            provenance: Provenance::OdeSample,
        })
    }

    pub fn sample_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.t)
    }
}

struct Field<'a> {
    piece: &'a Piece,
    k: f64,
    two_d: i32,
}

impl Field<'_> {
    fn speed(&self, lambda: f64) -> f64 {
        speed_from_radius(self.k, self.piece.value_at(lambda), self.two_d)
    }

    fn rk4(&self, y: f64, h: f64) -> f64 {
        let k1 = self.speed(y);
        let k2 = self.speed(y + 0.5 * h * k1);
        let k3 = self.speed(y + 0.5 * h * k2);
        let k4 = self.speed(y + h * k3);
        y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    fn doubled(&self, y: f64, h: f64) -> (f64, f64) {
        let one = self.rk4(y, h);
        let two = self.rk4(self.rk4(y, 0.5 * h), 0.5 * h);
        (two + (two - one) / 15.0, (two - one).abs())
    }
}

/// Integrates from `λ(0) = lambda0` until extinction or `t_max`.
pub fn integrate(
    base: &RadiusProfile,
    lambda0: f64,
    params: &OdeParams,
    consts: &DimensionalConstants,
) -> Result<Trajectory> {
    params.check()?;
    let a = base.support_length();
    if base.is_zero() && lambda0 == 0.0 {
        return Ok(Trajectory {
            nodes: vec![Node {
                t: 0.0,
                lambda: 0.0,
                speed: 0.0,
            }],
            crossings: Vec::new(),
            extinction: Some(0.0),
        });
    }
    if !(lambda0 > 0.0 && lambda0 <= a) {
        return Err(domain(format!("initial level {lambda0} outside (0, {a}]")));
    }
    if base.left(lambda0) == 0.0 {
        if !params.exploratory {
            return Err(Error::OpenCase { level: lambda0 });
        }
        let start = lambda0 * (1.0 - EXPLORATION_LADDER[EXPLORATION_LADDER.len() - 1]);
        log::warn!("exploratory start at {start} instead of {lambda0}");
        return integrate(base, start, params, consts);
    }
    let k = consts.speed_constant();
    let two_d = 2 * consts.d as i32;
    let jumps = base.jump_set();
    let mut t = 0.0;
    let mut lambda = lambda0;
    let mut idx = base.left_piece_index(lambda0).expect("level inside the support");
    let mut nodes = Vec::new();
    let mut crossings = Vec::new();
    loop {
        let piece = &base.pieces()[idx];
        let field = Field { piece, k, two_d };
        nodes.push(Node {
            t,
            lambda,
            speed: field.speed(lambda),
        });
        let reached = match piece.kind {
            PieceKind::Constant(c) => {
                let v = speed_from_radius(k, c, two_d);
                let dt = (lambda - piece.lo) / -v;
                if t + dt > params.t_max {
                    let end = lambda + v * (params.t_max - t);
                    nodes.push(Node {
                        t: params.t_max,
                        lambda: end,
                        speed: v,
                    });
                    false
                } else {
                    t += dt;
                    true
                }
            }
            _ => {
                let (tt, ok) = smooth_piece(&field, t, lambda, params, &mut nodes)?;
                t = tt;
                ok
            }
        };
        if !reached {
            return Ok(Trajectory {
                nodes,
                crossings,
                extinction: None,
            });
        }
        lambda = piece.lo;
        if idx == 0 {
            nodes.push(Node {
                t,
                lambda: 0.0,
                speed: field.speed(0.0),
            });
            return Ok(Trajectory {
                nodes,
                crossings,
                extinction: Some(t),
            });
        }
        // The incoming speed ends this piece; the next piece starts a new node.
        nodes.push(Node {
            t,
            lambda,
            speed: field.speed(lambda),
        });
        if let Some(j) = jumps.iter().find(|j| j.t == lambda) {
            crossings.push(JumpCrossing {
                t,
                jump: *j,
                bracket: erosion_speed(base, lambda, consts)?,
            });
        }
        idx -= 1;
    }
}

/// Steps through one non-constant piece. Returns the time at which its lower
/// end is reached, or `(t_max, false)`.
fn smooth_piece(field: &Field, mut t: f64, mut y: f64, params: &OdeParams, nodes: &mut Vec<Node>) -> Result<(f64, bool)> {
    let lo = field.piece.lo;
    let v0 = field.speed(y);
    let mut h = ((y - lo) / -v0 / 16.0).max(1e-300);
    let mut rejects = 0usize;
    loop {
        if t >= params.t_max {
            return Ok((params.t_max, false));
        }
        let h_try = h.min(params.t_max - t);
        let (next, err) = field.doubled(y, h_try);
        if err > params.step_tol && h_try > 1e-14 * t.max(1.0) {
            h *= (0.9 * (params.step_tol / err).powf(0.2)).clamp(0.1, 0.5);
            rejects += 1;
            if rejects > 10_000 {
                return Err(Error::Numeric {
                    message: "step size underflow in the erosion integrator".into(),
                    achieved: err,
                });
            }
            continue;
        }
        if next <= lo + params.event_tol {
            // Bisect for the step that lands on the piece boundary.
            let (mut a, mut b) = (0.0, h_try);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let ym = field.doubled(y, m).0;
                if ym > lo + params.event_tol {
                    a = m;
                } else {
                    b = m;
                }
                if (ym - lo).abs() <= params.event_tol {
                    break;
                }
            }
            return Ok((t + b, true));
        }
        t += h_try;
        y = next;
        nodes.push(Node {
            t,
            lambda: y,
            speed: field.speed(y),
        });
        let grow = if err == 0.0 { 4.0 } else { (0.9 * (params.step_tol / err).powf(0.2)).clamp(0.2, 4.0) };
        h = h_try * grow;
    }
}

/// Extinction time of the trajectory started at `lambda0`.
pub fn vanish_time(base: &RadiusProfile, lambda0: f64, params: &OdeParams, consts: &DimensionalConstants) -> Result<f64> {
    integrate(base, lambda0, params, consts)?
        .extinction
        .ok_or(Error::NotExtinct { t_max: params.t_max })
}

/// Trajectories started at `λ_0 (1 - ε)` over [`EXPLORATION_LADDER`].
///
/// Meant for `r_0(λ_0-) = 0`, where the initial speed is unbounded.
pub fn explore(
    base: &RadiusProfile,
    lambda0: f64,
    params: &OdeParams,
    consts: &DimensionalConstants,
) -> Result<Vec<(f64, Trajectory)>> {
    EXPLORATION_LADDER
        .iter()
        .map(|&eps| Ok((eps, integrate(base, lambda0 * (1.0 - eps), params, consts)?)))
        .collect()
}

/// `truncate(base, λ(t))`, the profile of `min(u_0, λ(t))`.
pub fn snapshot(base: &RadiusProfile, lambda_t: f64) -> RadiusProfile {
    base.truncate(lambda_t)
}
