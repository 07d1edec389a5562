//! Closed-form critical energies of disks and rectangular stripes.
//!
//! With `α = a·l` and `t = 4/(4 + α²)`, the layered disk term is
//! `B(α) = ((2 + α²)K(t) − (4 + α²)E(t))/√(4 + α²)` and
//!
//! ```text
//! F_{1,0,l}(B_r) = 2πr[−log 4 − log r + B(l/r)]
//! f_disk(a)      = F_{1,0,l}(B_{1/a})/|B_{1/a}| = 2a[−log 4 + log a + B(a·l)]
//! ```
//!
//! The stripe `S_{a,m} = (−am/2, am/2) × (−1/(2a), 1/(2a))` has mass `m`. Its
//! energies are exact at finite `m`; only the per-mass limits `m → ∞` are
//! asymptotic.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{elliptic_pair, elliptic_pair_complement, LayerSeparation};

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn require_ell(ell: f64) -> Result<()> {
    require_positive("ell", ell)
}

/// `B(α)`; tends to 0 like `α⁻³` as `α → ∞`.
fn layer_bracket(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    let (k, e) = elliptic_pair_complement(a2 / (4.0 + a2));
    ((2.0 + a2) * k - (4.0 + a2) * e) / (4.0 + a2).sqrt()
}

/// `F_{1,0,l}(B_r)`; the layered term vanishes for `l = ∞`.
pub fn disk_energy_gamma(r: f64, ell: LayerSeparation) -> Result<f64> {
    require_positive("r", r)?;
    let layer = match ell {
        LayerSeparation::Infinite => 0.0,
        LayerSeparation::Finite(l) => layer_bracket(l / r),
    };
    Ok(2.0 * PI * r * (-(4f64.ln()) - r.ln() + layer))
}

/// Energy per mass of the disk of radius `1/a`.
pub fn f_disk(a: f64, ell: f64) -> Result<f64> {
    require_positive("a", a)?;
    require_ell(ell)?;
    Ok(f_disk_unchecked(a, ell))
}

#[inline]
pub(crate) fn f_disk_unchecked(a: f64, ell: f64) -> f64 {
    2.0 * a * (-(4f64.ln()) + a.ln() + layer_bracket(a * ell))
}

/// `g(α) = 2α[−log 4 + log α + B(α)]`, so that `f_disk(a) = (g(al) − 2al log l)/l`.
pub fn g_alpha(alpha: f64) -> Result<f64> {
    require_positive("alpha", alpha)?;
    Ok(2.0 * alpha * (-(4f64.ln()) + alpha.ln() + layer_bracket(alpha)))
}

/// `g''(α)`.
pub fn g_second(alpha: f64) -> Result<f64> {
    require_positive("alpha", alpha)?;
    let a2 = alpha * alpha;
    let q = 4.0 + a2;
    let (k, e) = elliptic_pair_complement(a2 / q);
    let q32 = q * q.sqrt();
    Ok(2.0 * (q32 - 2.0 * (4.0 + 7.0 * a2 + a2 * a2) * e + 2.0 * a2 * (5.0 + a2) * k) / (alpha * q32))
}

fn require_unit(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain { function: "elliptic_k", value: t })
    }
}

/// `h₁(t) = √t + (−4 + t + 2t²)E(t) − (−4 + 3t + t²)K(t)`, `t ∈ [0, 1)`.
pub fn h1(t: f64) -> Result<f64> {
    require_unit(t)?;
    let (k, e) = elliptic_pair(t);
    Ok(t.sqrt() + (-4.0 + t + 2.0 * t * t) * e - (-4.0 + 3.0 * t + t * t) * k)
}

/// `h₂(t) = t − (4 − t − 2t²)E(t) + (4 − 3t − t²)K(t)`, `t ∈ [0, 1)`.
pub fn h2(t: f64) -> Result<f64> {
    require_unit(t)?;
    let (k, e) = elliptic_pair(t);
    Ok(t - (4.0 - t - 2.0 * t * t) * e + (4.0 - 3.0 * t - t * t) * k)
}

/// `∫₀^L∫₀^L ((s − t)² + c²)^{−1/2} ds dt = 2[L arsinh(L/c) − √(L² + c²) + c]`.
fn segment_pair(len: f64, c: f64) -> f64 {
    let lift = len * len / ((len * len + c * c).sqrt() + c);
    2.0 * (len * (len / c).asinh() - lift)
}

/// `E_{1,0}(S_{a,m})`, exact in `m`.
///
/// ```text
/// −2am log(am) − 2am − (2/a) log(1/a) − 2/a + I₂ + I₄
/// I₂ = (2 − 2√(1 + a⁴m²))/a + 2am arsinh(a²m)
/// I₄ = 2[a²m − √(1 + a⁴m²) + arcoth √(1 + a⁴m²)]/a
/// ```
pub fn stripe_energy_gamma(a: f64, m: f64) -> Result<f64> {
    require_positive("a", a)?;
    require_positive("m", m)?;
    Ok(stripe_gamma_unchecked(a, m))
}

fn stripe_gamma_unchecked(a: f64, m: f64) -> f64 {
    let (long, short) = (a * m, 1.0 / a);
    let x = a * a * m;
    let root = (1.0 + x * x).sqrt();
    // root − 1 without cancellation for small x
    let root_m1 = x * x / (root + 1.0);
    let i2 = -2.0 * root_m1 / a + 2.0 * long * x.asinh();
    // arcoth(√(1 + x²)) = arsinh(1/x) and x − √(1 + x²) = −1/(x + √(1 + x²))
    let i4 = 2.0 * ((1.0 / x).asinh() - 1.0 / (x + root)) / a;
    -2.0 * long * long.ln() - 2.0 * long - 2.0 * short * short.ln() - 2.0 * short + i2 + i4
}

/// `lim_{m→∞} F_{1,0,l}(S_{a,m})/m = 2a log(2a/l) − 4a + a log(1/a² + l²)`.
pub fn f_stripe(a: f64, ell: f64) -> Result<f64> {
    require_positive("a", a)?;
    require_ell(ell)?;
    Ok(f_stripe_unchecked(a, ell))
}

#[inline]
pub(crate) fn f_stripe_unchecked(a: f64, ell: f64) -> f64 {
    2.0 * a * (2.0 * a / ell).ln() - 4.0 * a + a * (1.0 / (a * a) + ell * ell).ln()
}

/// `F_{1,0,l}(S_{a,m})`, exact in `m`: [`stripe_energy_gamma`] plus the two
/// side-pair corrections `∫∫ ((s−t)² + l²)^{−1/2} − ((s−t)² + w² + l²)^{−1/2}`.
pub fn stripe_energy_modified(a: f64, m: f64, ell: LayerSeparation) -> Result<f64> {
    require_positive("a", a)?;
    require_positive("m", m)?;
    let l = match ell {
        LayerSeparation::Infinite => return Ok(stripe_gamma_unchecked(a, m)),
        LayerSeparation::Finite(l) => l,
    };
    Ok(stripe_modified_unchecked(a, m, l))
}

pub(crate) fn stripe_modified_unchecked(a: f64, m: f64, l: f64) -> f64 {
    let (long, short) = (a * m, 1.0 / a);
    let across_long = (short * short + l * l).sqrt();
    let across_short = (long * long + l * l).sqrt();
    stripe_gamma_unchecked(a, m) + segment_pair(long, l) - segment_pair(long, across_long)
        + segment_pair(short, l)
        - segment_pair(short, across_short)
}

/// Ansatz shape and its size parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnsatzShape {
    Disk { r: f64 },
    Stripe { a: f64, m: f64 },
}

/// Closed-form energy of a disk or a stripe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnsatzResult {
    #[serde(flatten)]
    pub shape: AnsatzShape,
    pub ell: LayerSeparation,
    pub energy: f64,
    pub energy_per_mass: f64,
}

impl AnsatzResult {
    pub fn disk(r: f64, ell: LayerSeparation) -> Result<Self> {
        let energy = disk_energy_gamma(r, ell)?;
        let mass = PI * r * r;
        Ok(Self { shape: AnsatzShape::Disk { r }, ell, energy, energy_per_mass: energy / mass })
    }

    pub fn stripe(a: f64, m: f64, ell: LayerSeparation) -> Result<Self> {
        let energy = stripe_energy_modified(a, m, ell)?;
        Ok(Self { shape: AnsatzShape::Stripe { a, m }, ell, energy, energy_per_mass: energy / m })
    }

    pub fn mass(&self) -> f64 {
        match self.shape {
            AnsatzShape::Disk { r } => PI * r * r,
            AnsatzShape::Stripe { m, .. } => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ansatz result serializes")
    }
}
