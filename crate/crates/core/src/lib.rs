//! Minimizing movements of the L¹-relaxed scale-invariant Willmore energy on
//! radially non-increasing functions.
//!
//! A radially non-increasing `u ≥ 0` is carried by its radius profile `r(t)`,
//! `{u ≥ t} = B(0, r(t))`. On such functions the relaxed energy is
//! `ω_d · sup u` and the implicit-Euler step with L¹ fidelity is a truncation
//! `min(u_0, λ)`. The flow is therefore an erosion `u_t = min(u_0, λ(t))`
//! whose height obeys `λ' = -ω_d / (α_d² r_0(λ)^{2d})`.
//!
//! Modules:
//! - [`profiles`]: radius profiles, L¹ distances, the text format
//! - [`energy`]: Willmore-type energies and the one-step functional
//! - [`scheme`]: the discrete level sequence and its interpolant
//! - [`erosion_ode`]: the limiting erosion law with jump handling
//! - [`coarea_lab`]: regularizing sequences and the C² reattachment
//! - [`oracles`]: brute-force and rearrangement checks on grids

pub mod coarea_lab;
pub mod energy;
pub mod erosion_ode;
mod error;
pub mod oracles;
pub mod poly;
pub mod profiles;
pub mod quadrature;
pub mod roots;
pub mod scheme;

pub use error::{Error, Result};
pub use profiles::{constants, l1_distance, DimensionalConstants, Extended, Piece, PieceKind, RadiusProfile};
