//! Energy evaluators.
//!
//! * [`energy_grid`]: volume form on a raster, `P − λ/(2|log δ|) ∫_Ω∫_{Ωᶜ} K`.
//! * [`energy_boundary`]: boundary form `P − λ/(2|log δ|) ∮∮ ν·ν Φ_{δ,l}`.
//! * [`gamma_limit_energy`], [`gamma_limit_energy_modified`]: the critical
//!   limits `E_{1,0}` and `F_{1,0,l}` as curve functionals.
//!
//! All double sums are reduced in a fixed order so results do not depend on
//! the number of worker threads.

mod boundary;
mod bounds;
mod cutting;
mod gamma;
mod grid;
pub(crate) mod near;
mod potential;

use serde::Serialize;

use crate::kernels::{KernelParams, LayerSeparation};

pub use boundary::{energy_boundary, energy_boundary_config};
pub use bounds::{lower_bound, rescale_params};
pub use cutting::cut_disk_delta;
pub use gamma::{
    gamma_limit_energy, gamma_limit_energy_config, gamma_limit_energy_modified,
    gamma_limit_energy_modified_config,
};
pub use grid::energy_grid;
pub use potential::{boundary_potential, potential_on_boundary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Evaluator {
    Grid,
    Boundary,
    GammaLimit,
    GammaLimitModified,
}

impl std::fmt::Display for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Evaluator::Grid => "GRID",
            Evaluator::Boundary => "BOUNDARY",
            Evaluator::GammaLimit => "GAMMA_LIMIT",
            Evaluator::GammaLimitModified => "GAMMA_LIMIT_MODIFIED",
        };
        f.write_str(s)
    }
}

/// Energy split into its local and nonlocal parts; `total` is their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    #[serde(rename = "perimeter")]
    pub perimeter_term: f64,
    #[serde(rename = "nonlocal")]
    pub nonlocal_term: f64,
    pub total: f64,
    pub evaluator: Evaluator,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<KernelParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<LayerSeparation>,
}

impl EnergyBreakdown {
    pub(crate) fn new(
        perimeter_term: f64,
        nonlocal_term: f64,
        evaluator: Evaluator,
        params: Option<KernelParams>,
    ) -> Self {
        Self {
            perimeter_term,
            nonlocal_term,
            total: perimeter_term + nonlocal_term,
            evaluator,
            ell: params.map(|p| p.ell()),
            params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("breakdown serializes")
    }
}

/// Sums `f(i)` for `i in 0..n` in parallel, reducing in index order.
pub(crate) fn ordered_sum<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: F) -> f64 {
    use rayon::prelude::*;
    let parts: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    parts.iter().sum()
}

#[inline]
pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
