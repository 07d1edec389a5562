//! Regularized dipolar isoperimetric energies in the plane.
//!
//! The crate evaluates
//!
//! ```text
//! F(Ω) = P(Ω) − λ/(2|log δ|) ∫_Ω ∫_{Ωᶜ} K_{δ,l}(|x − y|) dy dx
//! ```
//!
//! on raster sets and on smooth Jordan domains, its critical Γ-limit
//! `E_{1,0}` and the layered variant `F_{1,0,l}`, the closed-form disk and
//! stripe energies, the disk/stripe crossover just above `l = 2/e²`, and an
//! area-preserving shape gradient flow driven by `κ + 2v − μ = 0`.
//!
//! Modules are layered bottom-up: [`kernels`] → [`geometry`] → [`energy`] →
//! [`ansatz`] → [`phase`] → [`optimize`].

pub mod ansatz;
pub mod energy;
mod error;
pub mod geometry;
pub mod kernels;
pub mod optimize;
pub mod phase;
pub mod quad;

pub use error::{Error, Result};
pub use energy::{EnergyBreakdown, Evaluator};
pub use geometry::{Component, JordanCurve, Placement, RasterSet, SampledCurve, ShapeConfig};
pub use kernels::{KernelParams, LayerSeparation};
pub use phase::{PhasePoint, Winner};
