//! Singularity subtraction on a closed curve of perimeter `P`.
//!
//! Near the diagonal the self-interaction integrands are modelled through the
//! periodic chord `σ(s) = (P/π)|sin(πs/P)|`, which equals the chord of the
//! circle of the same perimeter. Models are subtracted node by node and their
//! integrals over `s ∈ (−P/2, P/2)` added back from the formulas here.

use std::f64::consts::PI;

use crate::kernels::{phi_delta_prime_unchecked, phi_delta_unchecked};
use crate::quad::GaussLegendre;

/// `σ_k = (P/π) sin(πk/n)` for `k = 0..n`.
pub(crate) fn chord_table(perimeter: f64, n: usize) -> Vec<f64> {
    let r = perimeter / PI;
    (0..n).map(|k| r * (PI * k as f64 / n as f64).sin()).collect()
}

/// Curvature models `q_δ`, `p_δ` of `ν·ν Φ_δ(|Δγ|) − Φ_δ(σ) ≈ κ² q_δ(σ) + κ₀² p_δ(σ)`.
#[inline]
pub(crate) fn q_model(s: f64, delta: f64) -> f64 {
    -0.5 * s * s * phi_delta_unchecked(s, delta) - s * s * s / 24.0 * phi_delta_prime_unchecked(s, delta)
}

#[inline]
pub(crate) fn p_model(s: f64, delta: f64) -> f64 {
    s * s * s / 24.0 * phi_delta_prime_unchecked(s, delta)
}

/// Integrals over one period of the chord-based models.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NearIntegrals {
    /// `∫ Φ_δ(σ) ds`
    pub phi: f64,
    /// `∫ q_δ(σ) ds`
    pub q: f64,
    /// `∫ p_δ(σ) ds`
    pub p: f64,
    /// `∫ σ Φ_δ'(σ) ds`
    pub sigma_dphi: f64,
}

/// `∫_0^{u0} f(u) du` on geometrically graded panels towards `u = 0`.
fn graded<F: Fn(f64) -> f64>(u0: f64, f: F) -> f64 {
    let rule = GaussLegendre::new(16);
    let mut acc = 0.0;
    let mut hi = u0;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        acc += rule.integrate(lo, hi, &f);
        hi = lo;
    }
    acc + rule.integrate(0.0, hi, &f)
}

impl NearIntegrals {
    pub fn new(perimeter: f64, delta: f64) -> Self {
        let r = perimeter / PI;
        let u0 = (delta / r).min(1.0).asin();
        let cos0 = u0.cos();
        let log_tan = if u0 >= 0.5 * PI { 0.0 } else { (0.5 * u0).tan().ln() };

        // inner region σ < δ, via u = πs/P
        let phi_in = if u0 > 0.0 {
            let smooth = graded(u0, |u| if u > 0.0 { (u.sin() / u).ln() } else { 0.0 });
            let log_int = u0 * u0.ln() - u0;
            2.0 * r / delta * (u0 * (1.0 - (r / delta).ln()) - log_int - smooth)
        } else {
            0.0
        };
        let q_in = 2.0 * r * graded(u0, |u| q_model(r * u.sin(), delta));
        let p_in = -(r * r * r) / (12.0 * delta) * (0.5 * u0 - 0.25 * (2.0 * u0).sin());
        let w_in = -2.0 * r * u0 / delta;

        Self {
            phi: phi_in - 2.0 * log_tan,
            q: q_in - 11.0 / 12.0 * r * r * cos0,
            p: p_in - r * r * cos0 / 12.0,
            sigma_dphi: w_in + 2.0 * log_tan,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    fn direct<F: Fn(f64) -> f64>(perimeter: f64, delta: f64, f: F) -> f64 {
        let r = perimeter / PI;
        let sd = if delta < r { (delta / r).asin() * perimeter / PI } else { 0.5 * perimeter };
        let g = |s: f64| f(r * (PI * s / perimeter).sin());
        2.0 * (adaptive(0.0, sd, 1e-14, &g) + adaptive(sd, 0.5 * perimeter, 1e-14, &g))
    }

    #[test]
    fn matches_direct_quadrature() {
        for (p, d) in [(2.0 * PI, 0.01), (2.0 * PI, 0.3), (1.0, 0.2), (0.5, 0.4), (10.0, 1e-4)] {
            let n = NearIntegrals::new(p, d);
            let phi = direct(p, d, |s| phi_delta_unchecked(s, d));
            let q = direct(p, d, |s| q_model(s, d));
            let pp = direct(p, d, |s| p_model(s, d));
            let w = direct(p, d, |s| s * phi_delta_prime_unchecked(s, d));
            assert!((n.phi - phi).abs() < 1e-10 * phi.abs().max(1.0), "phi {p} {d}: {} {}", n.phi, phi);
            assert!((n.q - q).abs() < 1e-10 * q.abs().max(1.0), "q {p} {d}");
            assert!((n.p - pp).abs() < 1e-10 * pp.abs().max(1.0), "p {p} {d}");
            assert!((n.sigma_dphi - w).abs() < 1e-10 * w.abs().max(1.0), "w {p} {d}");
        }
    }

    #[test]
    fn models_match_outer_forms() {
        let d = 0.01;
        assert!((q_model(0.5, d) + 11.0 / 24.0 * 0.5).abs() < 1e-15);
        assert!((p_model(0.5, d) + 0.5 / 24.0).abs() < 1e-15);
    }
}
