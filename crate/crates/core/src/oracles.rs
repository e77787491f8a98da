//! Grid and enumeration oracles for the structure results: radial
//! rearrangement does not increase the L¹ distance to a radial target, and
//! the one-step minimizer over non-increasing step profiles is a truncation.

use crate::energy::{functional_f, EnergyParams};
use crate::error::{domain, Error, Result};
use crate::profiles::{l1_distance, DimensionalConstants, Piece, RadiusProfile};

/// Default enumeration budget of [`brute_force_minimizer`].
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// Non-negative values on an origin-centered grid of `side^d` cells of width `h`.
///
/// The whole grid box lies inside `B(0, R0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    d: usize,
    side: usize,
    h: f64,
    values: Vec<f64>,
    enclosing_radius: f64,
}

impl GridFunction {
    pub fn new(d: usize, side: usize, h: f64, values: Vec<f64>, enclosing_radius: f64) -> Result<Self> {
        if d < 2 {
            return Err(domain(format!("dimension must be at least 2, got {d}")));
        }
        if side == 0 || !(h > 0.0) {
            return Err(domain("grid needs a positive side and cell size"));
        }
        let cells = side.checked_pow(d as u32).ok_or_else(|| domain("grid too large"))?;
        if values.len() != cells {
            return Err(domain(format!("expected {cells} values, got {}", values.len())));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(domain("grid values must be finite and non-negative"));
        }
        let corner = 0.5 * side as f64 * h * (d as f64).sqrt();
        if corner >= enclosing_radius {
            return Err(domain(format!(
                "grid corner at distance {corner} leaves the enclosing ball of radius {enclosing_radius}"
            )));
        }
        Ok(GridFunction {
            d,
            side,
            h,
            values,
            enclosing_radius,
        })
    }

    /// Zero grid function.
    pub fn zeros(d: usize, side: usize, h: f64, enclosing_radius: f64) -> Result<Self> {
        GridFunction::new(d, side, h, vec![0.0; side.pow(d as u32)], enclosing_radius)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_size(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn enclosing_radius(&self) -> f64 {
        self.enclosing_radius
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.d as i32)
    }

    /// Center of cell `index` (row-major, last axis fastest).
    pub fn cell_center(&self, index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        let mut rest = index;
        let offset = 0.5 * (self.side as f64 - 1.0);
        for axis in (0..self.d).rev() {
            x[axis] = (((rest % self.side) as f64) - offset) * self.h;
            rest /= self.side;
        }
        x
    }

    /// `h^d Σ u`.
    pub fn l1_norm(&self) -> f64 {
        self.cell_volume() * self.values.iter().sum::<f64>()
    }

    /// `h^d Σ |u - v|`; both grids must share their geometry.
    pub fn l1_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.d != other.d || self.side != other.side || self.h != other.h {
            return Err(domain("grid functions live on different grids"));
        }
        Ok(self.cell_volume()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

/// Samples the radial function of `profile` at the cell centers.
pub fn rasterize(profile: &RadiusProfile, d: usize, side: usize, h: f64) -> Result<GridFunction> {
    let mut g = GridFunction::zeros(d, side, h, profile.enclosing_radius())?;
    for i in 0..g.values.len() {
        let rho = g.cell_center(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        g.values[i] = profile.height_at_radius(rho);
    }
    Ok(g)
}

/// Replaces every superlevel set of `u` by the centered ball of the same volume.
///
/// The result is a step profile with one piece per distinct positive value;
/// `α_d r(t)^d` equals `h^d` times the number of cells with `u >= t`.
pub fn distribution_radialize(u: &GridFunction, consts: &DimensionalConstants) -> Result<RadiusProfile> {
    if consts.d != u.d {
        return Err(domain("dimension mismatch between grid and constants"));
    }
    let mut levels: Vec<f64> = u.values.iter().copied().filter(|v| *v > 0.0).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for (i, v) in levels.iter().enumerate() {
        match distinct.last_mut() {
            Some((last, count)) if *last == *v => *count = i + 1,
            _ => distinct.push((*v, i + 1)),
        }
    }
    let cell = u.cell_volume();
    let mut pieces = Vec::with_capacity(distinct.len());
    for j in (0..distinct.len()).rev() {
        let (top, count) = distinct[j];
        let bottom = distinct.get(j + 1).map_or(0.0, |x| x.0);
        let radius = (count as f64 * cell / consts.alpha_d).powf(1.0 / consts.d as f64);
        pieces.push(Piece::constant(bottom, top, radius));
    }
    if pieces.is_empty() {
        return Ok(RadiusProfile::zero(u.enclosing_radius));
    }
    RadiusProfile::new(pieces, u.enclosing_radius)
}

/// Distances before and after radialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityComparison {
    /// `‖u - raster(u_0)‖_1` on the grid.
    pub d_before: f64,
    /// `‖ũ - radialize(raster(u_0))‖_1`.
    pub d_after: f64,
    /// `‖radialize(raster(u_0)) - u_0‖_1`, the discretization error of the target.
    pub slack: f64,
}

/// Compares `u` and its radialization against the radial target `u0`.
///
/// Both sides of the comparison use the rasterized target, so
/// `d_after <= d_before` holds up to rounding; `slack` bounds the distance to
/// the continuous target.
pub fn fidelity_comparison(u: &GridFunction, u0: &RadiusProfile, consts: &DimensionalConstants) -> Result<FidelityComparison> {
    let target = rasterize(u0, u.d, u.side, u.h)?;
    let d_before = u.l1_distance(&target)?;
    let radial_target = distribution_radialize(&target, consts)?;
    let radial_u = distribution_radialize(u, consts)?;
    Ok(FidelityComparison {
        d_before,
        d_after: l1_distance(&radial_u, &radial_target, consts),
        slack: l1_distance(&radial_target, u0, consts),
    })
}

/// A non-increasing step profile: `radius_grid[indices[i]]` on `[i Δt, (i+1) Δt)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StepCandidate {
    pub indices: Vec<usize>,
}

impl StepCandidate {
    /// Number of levels with a positive radius.
    pub fn support_levels(&self) -> usize {
        self.indices.iter().take_while(|&&i| i > 0).count()
    }

    pub fn to_profile(&self, problem: &BruteForceProblem) -> Result<RadiusProfile> {
        let values: Vec<f64> = self.indices[..self.support_levels()]
            .iter()
            .map(|&i| problem.radius_grid[i])
            .collect();
        if values.is_empty() {
            return Ok(RadiusProfile::zero(problem.enclosing_radius));
        }
        RadiusProfile::steps(&values, problem.dt, problem.enclosing_radius)
    }
}

/// The finite one-step problem: candidates on `m` levels of width `dt` with
/// radii from `radius_grid` (`radius_grid[0] = 0`, increasing).
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceProblem {
    pub radius_grid: Vec<f64>,
    pub dt: f64,
    pub base: StepCandidate,
    pub enclosing_radius: f64,
}

impl BruteForceProblem {
    pub fn new(radius_grid: Vec<f64>, dt: f64, base: Vec<usize>, enclosing_radius: f64) -> Result<Self> {
        if radius_grid.len() < 2 || radius_grid[0] != 0.0 || radius_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("radius grid must start at 0 and increase"));
        }
        if radius_grid[radius_grid.len() - 1] >= enclosing_radius {
            return Err(domain("radius grid leaves the enclosing ball"));
        }
        if !(dt > 0.0) || base.is_empty() {
            return Err(domain("need a positive level width and at least one level"));
        }
        if base.iter().any(|&i| i >= radius_grid.len()) || base.windows(2).any(|w| w[1] > w[0]) {
            return Err(domain("base indices must be in range and non-increasing"));
        }
        Ok(BruteForceProblem {
            radius_grid,
            dt,
            base: StepCandidate { indices: base },
            enclosing_radius,
        })
    }

    pub fn levels(&self) -> usize {
        self.base.indices.len()
    }

    /// `C(m + k, m)` with `k + 1` radius values.
    pub fn candidate_count(&self) -> u128 {
        let m = self.levels() as u128;
        let k = (self.radius_grid.len() - 1) as u128;
        let mut c: u128 = 1;
        for i in 1..=m {
            c = c * (k + i) / i;
        }
        c
    }

    pub fn base_profile(&self) -> Result<RadiusProfile> {
        self.base.to_profile(self)
    }

    /// `F` of a candidate: `ω_d Δt (#positive levels) + (α²/2τ)(Δt Σ |ρ^d - ρ_0^d|)²`.
    pub fn energy(&self, candidate: &StepCandidate, tau: f64, consts: &DimensionalConstants) -> f64 {
        let d = consts.d as i32;
        let gap: f64 = candidate
            .indices
            .iter()
            .zip(&self.base.indices)
            .map(|(&i, &j)| (self.radius_grid[i].powi(d) - self.radius_grid[j].powi(d)).abs())
            .sum::<f64>()
            * self.dt;
        consts.omega_d * self.dt * candidate.support_levels() as f64
            + consts.alpha_d * consts.alpha_d / (2.0 * tau) * gap * gap
    }

    /// The base truncated to its first `levels` levels.
    pub fn truncation(&self, levels: usize) -> StepCandidate {
        let mut indices = self.base.indices.clone();
        for i in indices.iter_mut().skip(levels) {
            *i = 0;
        }
        StepCandidate { indices }
    }

    /// Number of levels `j` with `candidate = truncation(j)`, if any.
    pub fn truncation_level(&self, candidate: &StepCandidate) -> Option<usize> {
        let j = candidate.support_levels();
        (self.truncation(j) == *candidate).then_some(j)
    }
}

/// Result of the exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub argmin: StepCandidate,
    pub value: f64,
    /// `Some(j)` when the argmin equals the base truncated after `j` levels.
    pub truncation_level: Option<usize>,
    pub candidates: u128,
}

impl BruteForceResult {
    pub fn is_truncation(&self) -> bool {
        self.truncation_level.is_some()
    }
}

/// Calls `visit` on every non-increasing index sequence of length `m` over
/// `0..=k`, in lexicographic order.
pub fn for_each_candidate(m: usize, k: usize, mut visit: impl FnMut(&StepCandidate)) {
    let mut c = StepCandidate { indices: vec![0; m] };
    loop {
        visit(&c);
        // Next sequence in lexicographic order: bump the rightmost position
        // that can grow without exceeding its left neighbour, zero the rest.
        let mut pos = None;
        for i in (0..m).rev() {
            let cap = if i == 0 { k } else { c.indices[i - 1] };
            if c.indices[i] < cap {
                pos = Some(i);
                break;
            }
        }
        match pos {
            None => return,
            Some(i) => {
                c.indices[i] += 1;
                for x in c.indices.iter_mut().skip(i + 1) {
                    *x = 0;
                }
            }
        }
    }
}

/// Minimizes `F` over every candidate; ties go to the lexicographically smallest.
pub fn brute_force_minimizer(
    problem: &BruteForceProblem,
    tau: f64,
    consts: &DimensionalConstants,
    budget: u128,
) -> Result<BruteForceResult> {
    if !(tau > 0.0) {
        return Err(domain(format!("time step must be positive, got {tau}")));
    }
    let count = problem.candidate_count();
    if count > budget {
        return Err(Error::Budget { count, budget });
    }
    let mut best: Option<(f64, StepCandidate)> = None;
    for_each_candidate(problem.levels(), problem.radius_grid.len() - 1, |c| {
        let v = problem.energy(c, tau, consts);
        if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
            best = Some((v, c.clone()));
        }
    });
    let (value, argmin) = best.expect("at least the zero candidate");
    Ok(BruteForceResult {
        truncation_level: problem.truncation_level(&argmin),
        argmin,
        value,
        candidates: count,
    })
}

/// `F(truncate(base, |supp r'|)) <= F(r') + tol` for every candidate.
///
/// Returns the first violating candidate, if any.
pub fn truncation_dominance(
    problem: &BruteForceProblem,
    tau: f64,
    consts: &DimensionalConstants,
    tol: f64,
) -> Option<StepCandidate> {
    let mut violation = None;
    for_each_candidate(problem.levels(), problem.radius_grid.len() - 1, |c| {
        if violation.is_some() {
            return;
        }
        let t = problem.truncation(c.support_levels());
        if problem.energy(&t, tau, consts) > problem.energy(c, tau, consts) + tol {
            violation = Some(c.clone());
        }
    });
    violation
}

/// `F` of two profiles through [`functional_f`], for cross-checking [`BruteForceProblem::energy`].
pub fn profile_energy(
    candidate: &RadiusProfile,
    base: &RadiusProfile,
    tau: f64,
    consts: &DimensionalConstants,
) -> Result<f64> {
    Ok(functional_f(candidate, base, &EnergyParams::scale_invariant(tau, *consts)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::constants;
    use std::f64::consts::PI;

    #[test]
    fn radialize_two_patches() {
        let c = constants(2).unwrap();
        let side = 40;
        let h = 0.1;
        let mut g = GridFunction::zeros(2, side, h, 4.0).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                g.values_mut()[i * side + j] = 1.0;
                g.values_mut()[(20 + i) * side + 25 + j] = 1.0;
            }
        }
        let r = distribution_radialize(&g, &c).unwrap();
        assert!((r.eval(0.5).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-14);
        assert_eq!(r.eval(1.5).unwrap(), 0.0);
        assert!((c.alpha_d * r.integral_r_pow(2.0, 0.0, 1.0).unwrap().to_f64() - g.l1_norm()).abs() < 1e-13);
        let z = distribution_radialize(&GridFunction::zeros(2, 4, 0.1, 1.0).unwrap(), &c).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn rasterized_ball_radializes_to_a_ball() {
        let c = constants(2).unwrap();
        let ball = RadiusProfile::ball(1.0, 1.0, 3.0).unwrap();
        let g = rasterize(&ball, 2, 64, 3.0 / 64.0).unwrap();
        let r = distribution_radialize(&g, &c).unwrap();
        assert!((r.eval(0.5).unwrap() - 1.0).abs() < 3.0 / 64.0 * 2f64.sqrt());
        let cmp = fidelity_comparison(&g, &ball, &c).unwrap();
        assert_eq!(cmp.d_before, 0.0);
        assert_eq!(cmp.d_after, 0.0);
    }

    #[test]
    fn candidates_are_enumerated_in_order() {
        let mut seen = Vec::new();
        for_each_candidate(3, 2, |c| seen.push(c.clone()));
        assert_eq!(seen.len(), 10);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let p = BruteForceProblem::new(vec![0.0, 1.0, 2.0], 0.1, vec![2, 1, 1], 3.0).unwrap();
        assert_eq!(p.candidate_count(), 10);
    }

    #[test]
    fn budget_is_enforced() {
        let c = constants(2).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let p = BruteForceProblem::new(grid, 0.1, vec![20; 12], 3.0).unwrap();
        assert!(matches!(
            brute_force_minimizer(&p, 1.0, &c, DEFAULT_BUDGET),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn step_energy_matches_the_profile_functional() {
        let c = constants(2).unwrap();
        let grid = vec![0.0, 0.5, 1.0, 1.5];
        let p = BruteForceProblem::new(grid, 0.25, vec![3, 2, 2, 1], 2.0).unwrap();
        let cand = StepCandidate {
            indices: vec![3, 1, 0, 0],
        };
        let direct = p.energy(&cand, 0.3, &c);
        let via = profile_energy(&cand.to_profile(&p).unwrap(), &p.base_profile().unwrap(), 0.3, &c).unwrap();
        assert!((direct - via).abs() < 1e-12 * via);
    }
}
