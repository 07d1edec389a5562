use std::f64::consts::E;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{KernelParams, LayerSeparation};

/// A priori lower bound on `E_{λ,δ}` for a set of perimeter `P` and mass `m`.
///
/// For `P ≤ πm/δ` the bound is `(1 − λ + (λ/|log δ|) log(P/(eπm)))·P`,
/// otherwise `(1 − λ/|log δ|)·P`.
pub fn lower_bound(perimeter: f64, mass: f64, params: &KernelParams) -> f64 {
    let beta = params.beta();
    if perimeter <= PI * mass / params.delta() {
        (1.0 - params.lambda() + beta * (perimeter / (E * PI * mass)).ln()) * perimeter
    } else {
        (1.0 - beta) * perimeter
    }
}

/// Parameters `(λ̃, δ̃, l̃)` and mass `m̃` for the rescaled set `α⁻¹Ω`, such that
/// `α F_{λ̃,δ̃,l̃}(α⁻¹Ω) = F_{λ,δ,l}(Ω)`.
///
/// `δ̃ = δ/α`, `l̃ = l/α`, `m̃ = m/α²` and `λ̃/|log δ̃| = λ/|log δ|`.
pub fn rescale_params(alpha: f64, params: &KernelParams, mass: f64) -> Result<(KernelParams, f64)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let delta = params.delta() / alpha;
    if delta >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "rescaled delta {delta} must stay below 1"
        )));
    }
    let lambda = params.lambda() * delta.ln().abs() / params.log_delta_abs();
    let ell = match params.ell() {
        LayerSeparation::Finite(l) => LayerSeparation::Finite(l / alpha),
        LayerSeparation::Infinite => LayerSeparation::Infinite,
    };
    Ok((KernelParams::rescaled(lambda, delta, ell)?, mass / (alpha * alpha)))
}
