use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Dimension `d` with the unit-ball volume `alpha_d` and unit-sphere area `omega_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalConstants {
    pub d: usize,
    pub alpha_d: f64,
    pub omega_d: f64,
}

impl DimensionalConstants {
    /// `alpha_d = pi^(d/2) / Gamma(d/2 + 1)`, evaluated through the recurrence
    /// `alpha_d = 2 pi / d * alpha_(d-2)` which is exact for integer `d`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(domain(format!("dimension must be at least 2, got {d}")));
        }
        let mut alpha = if d % 2 == 0 { 1.0 } else { 2.0 };
        let mut k = if d % 2 == 0 { 2 } else { 3 };
        while k <= d {
            alpha *= 2.0 * PI / k as f64;
            k += 2;
        }
        Ok(DimensionalConstants {
            d,
            alpha_d: alpha,
            omega_d: d as f64 * alpha,
        })
    }

    /// Erosion speed constant `omega_d / alpha_d^2`.
    pub fn speed_constant(&self) -> f64 {
        self.omega_d / (self.alpha_d * self.alpha_d)
    }

    /// `omega_d / (alpha_d^2 R^(2d))`, the erosion rate of the ball of radius `R`.
    pub fn ball_rate(&self, radius: f64) -> f64 {
        self.speed_constant() / radius.powi(2 * self.d as i32)
    }
}

/// Shorthand for [`DimensionalConstants::new`].
pub fn constants(d: usize) -> Result<DimensionalConstants> {
    DimensionalConstants::new(d)
}
