//! Scalar kernels, their radial potentials, and complete elliptic integrals.
//!
//! The interaction kernel is
//!
//! ```text
//! K_{δ,l}(r) = g_δ(r)/r³ − (r² − 2l²)/(r² + l²)^{5/2},   g_δ = 1_{(δ,∞)}
//! ```
//!
//! and `Φ_{δ,l}` is its radial potential, `ΔΦ_{δ,l}(|z|) = K_{δ,l}(|z|)` away
//! from the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Layer separation `l`. `Infinite` removes the layered correction exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayerSeparation {
    Finite(f64),
    Infinite,
}

impl LayerSeparation {
    pub fn finite(self) -> Option<f64> {
        match self {
            LayerSeparation::Finite(l) => Some(l),
            LayerSeparation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LayerSeparation::Infinite)
    }

    /// Parses a positive number or one of `inf`, `infinity`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "+inf" {
            return Ok(LayerSeparation::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("layer separation `{s}`")))?;
        Self::from_f64(v)
    }

    /// `+∞` maps to `Infinite`; otherwise the value must be positive and finite.
    pub fn from_f64(v: f64) -> Result<Self> {
        if v == f64::INFINITY {
            Ok(LayerSeparation::Infinite)
        } else if v.is_finite() && v > 0.0 {
            Ok(LayerSeparation::Finite(v))
        } else {
            Err(Error::InvalidParameter(format!("layer separation must be > 0, got {v}")))
        }
    }
}

impl std::fmt::Display for LayerSeparation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LayerSeparation::Finite(l) => write!(f, "{l}"),
            LayerSeparation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EllRepr {
    Num(f64),
    Text(String),
}

impl Serialize for LayerSeparation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LayerSeparation::Finite(l) => EllRepr::Num(*l),
            LayerSeparation::Infinite => EllRepr::Text("inf".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LayerSeparation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = match EllRepr::deserialize(d)? {
            EllRepr::Num(v) => LayerSeparation::from_f64(v),
            EllRepr::Text(t) => LayerSeparation::parse(&t),
        };
        r.map_err(serde::de::Error::custom)
    }
}

/// The triple `(λ, δ, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct KernelParams {
    lambda: f64,
    delta: f64,
    ell: LayerSeparation,
}

#[derive(Deserialize)]
struct RawParams {
    lambda: f64,
    delta: f64,
    ell: LayerSeparation,
}

impl TryFrom<RawParams> for KernelParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        KernelParams::new(r.lambda, r.delta, r.ell)
    }
}

impl KernelParams {
    /// Requires `λ ≥ 0` and `0 < δ < 1/2`.
    ///
    /// `λ = 0` is accepted so that the pure-perimeter limit can be evaluated.
    pub fn new(lambda: f64, delta: f64, ell: LayerSeparation) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1/2), got {delta}"
            )));
        }
        if let LayerSeparation::Finite(l) = ell {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParameter(format!("ell must be > 0, got {l}")));
            }
        }
        Ok(Self { lambda, delta, ell })
    }

    /// Parameters produced by rescaling, where `δ` may reach up to 1.
    pub(crate) fn rescaled(lambda: f64, delta: f64, ell: LayerSeparation) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rescaled delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self { lambda, delta, ell })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn ell(&self) -> LayerSeparation {
        self.ell
    }

    /// `|log δ|`.
    pub fn log_delta_abs(&self) -> f64 {
        self.delta.ln().abs()
    }

    /// `β = λ/|log δ|`.
    pub fn beta(&self) -> f64 {
        self.lambda / self.log_delta_abs()
    }

    /// Prefactor `λ/(2|log δ|)` of the nonlocal term.
    pub fn nonlocal_prefactor(&self) -> f64 {
        0.5 * self.beta()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.delta, self.ell)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.lambda, delta, self.ell)
    }
}

/// `g_δ(r) = 1` for `r > δ`, else 0.
pub fn g_cutoff(r: f64, delta: f64) -> f64 {
    if r > delta {
        1.0
    } else {
        0.0
    }
}

fn require_positive(r: f64, function: &'static str) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { function, value: r })
    }
}

/// `Φ_δ(r)`: `1/r` for `r ≥ δ`, `(1 − log(r/δ))/δ` below.
pub fn phi_delta(r: f64, delta: f64) -> Result<f64> {
    require_positive(r, "phi_delta")?;
    Ok(phi_delta_unchecked(r, delta))
}

/// `Φ_δ'(r)`: `−1/r²` for `r ≥ δ`, `−1/(δr)` below.
pub fn phi_delta_prime(r: f64, delta: f64) -> Result<f64> {
    require_positive(r, "phi_delta_prime")?;
    Ok(phi_delta_prime_unchecked(r, delta))
}

#[inline]
pub(crate) fn phi_delta_unchecked(r: f64, delta: f64) -> f64 {
    if r >= delta {
        1.0 / r
    } else {
        (1.0 - (r / delta).ln()) / delta
    }
}

#[inline]
pub(crate) fn phi_delta_prime_unchecked(r: f64, delta: f64) -> f64 {
    if r >= delta {
        -1.0 / (r * r)
    } else {
        -1.0 / (delta * r)
    }
}

/// Layered correction `−(r² − 2l²)/(r² + l²)^{5/2}`; defined at `r = 0`.
#[inline]
pub(crate) fn layer_kernel(r: f64, ell: LayerSeparation) -> f64 {
    match ell {
        LayerSeparation::Infinite => 0.0,
        LayerSeparation::Finite(l) => {
            let q = r * r + l * l;
            -(r * r - 2.0 * l * l) / (q * q * q.sqrt())
        }
    }
}

/// `K_{δ,l}(r)`.
pub fn kernel_k(r: f64, params: &KernelParams) -> Result<f64> {
    require_positive(r, "kernel_k")?;
    Ok(g_cutoff(r, params.delta) / (r * r * r) + layer_kernel(r, params.ell))
}

/// `Φ_{δ,l}(r) = Φ_δ(r) − 1/√(r² + l²)`.
pub fn phi_delta_l(r: f64, params: &KernelParams) -> Result<f64> {
    require_positive(r, "phi_delta_l")?;
    let layer = match params.ell {
        LayerSeparation::Infinite => 0.0,
        LayerSeparation::Finite(l) => 1.0 / (r * r + l * l).sqrt(),
    };
    Ok(phi_delta_unchecked(r, params.delta) - layer)
}

/// `∫_{ℝ²} K_{δ,l} = 2π/δ`; the layered part integrates to zero.
pub fn kernel_total_mass(params: &KernelParams) -> f64 {
    2.0 * PI / params.delta
}

/// Complete elliptic integral of the first kind, `K(k) = ∫₀^{π/2} (1 − k sin²θ)^{−1/2} dθ`.
///
/// `k` is the parameter multiplying `sin²θ`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain { function: "elliptic_k", value: k });
    }
    Ok(elliptic_pair(k).0)
}

/// Complete elliptic integral of the second kind, `E(k) = ∫₀^{π/2} (1 − k sin²θ)^{1/2} dθ`.
pub fn elliptic_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain { function: "elliptic_e", value: k });
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok(elliptic_pair(k).1)
}

/// `(K(k), E(k))` from one arithmetic–geometric mean sweep, `0 ≤ k < 1`.
pub(crate) fn elliptic_pair(k: f64) -> (f64, f64) {
    debug_assert!((0.0..1.0).contains(&k));
    elliptic_pair_complement(1.0 - k)
}

/// `(K(k), E(k))` given the complementary parameter `1 − k ∈ (0, 1]`; exact
/// near `k = 1` when `1 − k` is known in closed form.
pub(crate) fn elliptic_pair_complement(kc: f64) -> (f64, f64) {
    debug_assert!(kc > 0.0 && kc <= 1.0);
    let mut a = 1.0;
    let mut b = kc.sqrt();
    let mut sum = 0.5 * (1.0 - kc);
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let kk = PI / (2.0 * a);
    (kk, kk * (1.0 - sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;

    fn params(lambda: f64, delta: f64, ell: LayerSeparation) -> KernelParams {
        KernelParams::new(lambda, delta, ell).unwrap()
    }

    #[test]
    fn cutoff_is_open_interval_indicator() {
        assert_eq!(g_cutoff(0.2, 0.1), 1.0);
        assert_eq!(g_cutoff(0.05, 0.1), 0.0);
        assert_eq!(g_cutoff(0.1, 0.1), 0.0);
    }

    #[test]
    fn phi_branches() {
        assert!((phi_delta(0.2, 0.1).unwrap() - 5.0).abs() < 1e-14);
        let inner = 10.0 * (1.0 - 0.5f64.ln());
        assert!((phi_delta(0.05, 0.1).unwrap() - inner).abs() < 1e-12);
        assert!((inner - 16.9315).abs() < 1e-4);
        for d in [0.01, 0.1, 0.3] {
            let lo = phi_delta(d * (1.0 - 1e-12), d).unwrap();
            assert!((lo - 1.0 / d).abs() < 1e-9 / d);
            assert_eq!(phi_delta(d, d).unwrap(), 1.0 / d);
        }
        assert!(phi_delta(0.0, 0.1).is_err());
    }

    #[test]
    fn phi_prime_branches() {
        assert_eq!(phi_delta_prime(2.0, 0.1).unwrap(), -0.25);
        assert!((phi_delta_prime(0.05, 0.1).unwrap() + 200.0).abs() < 1e-10);
        let d = 0.1;
        assert!((phi_delta_prime(d, d).unwrap() + 1.0 / (d * d)).abs() < 1e-10);
        assert!(phi_delta_prime(0.0, 0.1).is_err());
    }

    #[test]
    fn kernel_values() {
        let l = 0.3;
        let p = params(1.0, 0.1, LayerSeparation::Finite(l));
        let r = 2f64.sqrt() * l;
        assert!((kernel_k(r, &p).unwrap() - 1.0 / r.powi(3)).abs() < 1e-12);
        let pinf = params(1.0, 0.1, LayerSeparation::Infinite);
        assert_eq!(kernel_k(0.05, &pinf).unwrap(), 0.0);
        let p1 = params(1.0, 0.1, LayerSeparation::Finite(1.0));
        assert!((kernel_k(1.0, &p1).unwrap() - (1.0 + 2f64.powf(-2.5))).abs() < 1e-14);
        assert!((kernel_k(1.0, &p1).unwrap() - 1.176777).abs() < 1e-6);
    }

    #[test]
    fn phi_l_values() {
        let pinf = params(1.0, 0.1, LayerSeparation::Infinite);
        assert_eq!(phi_delta_l(0.7, &pinf).unwrap(), phi_delta(0.7, 0.1).unwrap());
        let p1 = params(1.0, 0.1, LayerSeparation::Finite(1.0));
        assert!((phi_delta_l(1.0, &p1).unwrap() - 0.292893).abs() < 1e-6);
        let d = 0.1;
        let expect = 1.0 / d - 1.0 / (d * d + 1.0f64).sqrt();
        assert!((phi_delta_l(d, &p1).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn total_mass_values() {
        let p = params(1.0, 0.1, LayerSeparation::Infinite);
        assert!((kernel_total_mass(&p) - 20.0 * PI).abs() < 1e-12);
        let p = params(1.0, 0.4999, LayerSeparation::Finite(0.7));
        assert!((kernel_total_mass(&p) - 2.0 * PI / 0.4999).abs() < 1e-12);
    }

    #[test]
    fn radial_integral_matches_total_mass() {
        for (delta, ell) in [(0.1, LayerSeparation::Infinite), (0.05, LayerSeparation::Finite(0.4))] {
            let p = params(1.0, delta, ell);
            let big_r = 50.0;
            let inner = adaptive(delta, 1.0, 1e-12, |r| 2.0 * PI * r * kernel_k(r, &p).unwrap())
                + adaptive(1.0, big_r, 1e-12, |r| 2.0 * PI * r * kernel_k(r, &p).unwrap());
            let layer_inside_delta =
                adaptive(0.0, delta, 1e-13, |r| 2.0 * PI * r * layer_kernel(r, ell));
            let mut tail = 2.0 * PI / big_r;
            if let LayerSeparation::Finite(l) = ell {
                tail -= 2.0 * PI * big_r * big_r / (big_r * big_r + l * l).powf(1.5);
            }
            let total = inner + layer_inside_delta + tail;
            assert!(
                (total - kernel_total_mass(&p)).abs() < 1e-8 * kernel_total_mass(&p),
                "{total}"
            );
        }
    }

    #[test]
    fn layer_correction_integrates_to_zero() {
        let l = 0.6;
        let v = adaptive(0.0, 1.0, 1e-14, |r| 2.0 * PI * r * layer_kernel(r, LayerSeparation::Finite(l)))
            + crate::quad::adaptive_to_infinity(1.0, 1e-14, |r| {
                2.0 * PI * r * layer_kernel(r, LayerSeparation::Finite(l))
            });
        assert!(v.abs() < 1e-10, "{v}");
    }

    #[test]
    fn elliptic_endpoints() {
        assert!((elliptic_k(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((elliptic_e(0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(-0.1).is_err());
        assert!(elliptic_e(1.1).is_err());
    }

    #[test]
    fn elliptic_matches_quadrature() {
        for i in 0..10 {
            let k = i as f64 / 10.0;
            let kq = adaptive(0.0, PI / 2.0, 1e-14, |t| 1.0 / (1.0 - k * t.sin().powi(2)).sqrt());
            let eq = adaptive(0.0, PI / 2.0, 1e-14, |t| (1.0 - k * t.sin().powi(2)).sqrt());
            assert!((elliptic_k(k).unwrap() - kq).abs() < 1e-10, "K({k})");
            assert!((elliptic_e(k).unwrap() - eq).abs() < 1e-10, "E({k})");
        }
    }

    #[test]
    fn elliptic_near_one() {
        // K(k) ~ log(4/√(1−k)) as k → 1.
        let k: f64 = 1.0 - 1e-12;
        let approx = (4.0 / (1.0 - k).sqrt()).ln();
        assert!((elliptic_k(k).unwrap() - approx).abs() < 1e-8);
        assert!((elliptic_e(k).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn majorant_regression_value() {
        let t = 0.85;
        let v = 1.0 + 7.0 * elliptic_e(t).unwrap() - 0.5 * (4.0 + 5.0 * t) * elliptic_k(t).unwrap();
        assert!((v + 0.850922).abs() < 1e-4, "{v}");
        assert!((v + 0.8509224629).abs() < 1e-9, "{v}");
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::new(1.0, 0.5, LayerSeparation::Infinite).is_err());
        assert!(KernelParams::new(1.0, 0.0, LayerSeparation::Infinite).is_err());
        assert!(KernelParams::new(-1.0, 0.1, LayerSeparation::Infinite).is_err());
        assert!(LayerSeparation::from_f64(0.0).is_err());
        assert_eq!(LayerSeparation::parse("inf").unwrap(), LayerSeparation::Infinite);
        let p = params(0.7, 0.01, LayerSeparation::Finite(2.0));
        let s = serde_json::to_string(&p).unwrap();
        let back: KernelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let pinf: KernelParams =
            serde_json::from_str(r#"{"lambda":1.0,"delta":0.01,"ell":"inf"}"#).unwrap();
        assert!(pinf.ell().is_infinite());
        assert!(serde_json::from_str::<KernelParams>(r#"{"lambda":1.0,"delta":0.7,"ell":1}"#).is_err());
    }
}
