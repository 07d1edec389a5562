//! Disk/stripe competition in the layered critical limit.
//!
//! `f_disk` is strictly convex in `a` and `f_disk'(0⁺) = 2[log(2/l) − 2]`, so
//! an interior minimizer `a(l)` exists iff `l > 2/e²`. Just above that
//! threshold `f_stripe(a(l)) < f_disk(a(l))`, and long stripes of large mass
//! beat every finite assembly of disks.

use serde::Serialize;

use crate::ansatz::{f_disk_unchecked, f_stripe_unchecked, stripe_modified_unchecked};
use crate::error::{Error, Result};

/// `2/e²`, below which `f_disk` has no interior minimum.
pub const ELL_CRITICAL: f64 = 2.0 * 0.135_335_283_236_612_7;

const A_LO: f64 = 1e-8;
const GOLDEN_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 1e-10;
const WIN_GUARD: f64 = 1e-10;
const MASS_CAP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Winner {
    Disk,
    Stripe,
    Degenerate,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Winner::Disk => "DISK",
            Winner::Stripe => "STRIPE",
            Winner::Degenerate => "DEGENERATE",
        })
    }
}

/// One row of the crossover table. Degenerate rows carry no minimizer; their
/// `f_disk_min` is the infimum 0 approached as `a → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub ell: f64,
    pub a_opt: Option<f64>,
    pub f_disk_min: f64,
    #[serde(rename = "f_stripe")]
    pub f_stripe_at_a_opt: Option<f64>,
    pub winner: Winner,
    #[serde(rename = "M_est")]
    pub m_est: Option<f64>,
}

fn check_ell(ell: f64) -> Result<()> {
    if ell > 0.0 && ell.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("ell must be positive and finite, got {ell}")))
    }
}

/// Five-point central-difference slope of `f_disk(·, ell)`.
fn disk_slope(a: f64, ell: f64) -> f64 {
    let h = 1e-4 * a;
    let f = |x: f64| f_disk_unchecked(x, ell);
    (8.0 * (f(a + h) - f(a - h)) - (f(a + 2.0 * h) - f(a - 2.0 * h))) / (12.0 * h)
}

/// `argmin_a f_disk(a, ell)`, or `None` when the infimum sits at `a → 0`.
///
/// Golden section on `[1e−8, a*]`, `a*` doubled until `f_disk` increases, to
/// `1e−12` in `a`; then bisection on the central-difference slope until
/// `|f_disk'| ≤ 1e−10`, which golden section alone cannot reach through the
/// rounding noise of `f_disk`.
pub fn find_optimal_disk_scale(ell: f64) -> Result<Option<f64>> {
    check_ell(ell)?;
    if ell <= ELL_CRITICAL {
        return Ok(None);
    }
    let f = |a: f64| f_disk_unchecked(a, ell);
    let mut hi = 1.0;
    while disk_slope(hi, ell) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NotFound(format!("f_disk(·, {ell}) has no bracketed minimum")));
        }
    }
    let a = golden_section(f, A_LO, hi, GOLDEN_TOL);
    if a <= 2.0 * A_LO {
        return Ok(None);
    }
    Ok(Some(polish(a, ell)))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

fn polish(a: f64, ell: f64) -> f64 {
    if disk_slope(a, ell).abs() <= SLOPE_TOL {
        return a;
    }
    // widen until the slope changes sign, then bisect
    let mut w = 1e-9 * a.max(1e-3);
    let (mut lo, mut hi) = (a - w, a + w);
    while disk_slope(lo, ell) > 0.0 || disk_slope(hi, ell) < 0.0 {
        w *= 2.0;
        lo = (a - w).max(0.5 * A_LO);
        hi = a + w;
    }
    let mut mid = a;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let s = disk_slope(mid, ell);
        if s.abs() <= SLOPE_TOL || mid <= lo || mid >= hi {
            break;
        }
        if s < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// Disk minimum against the stripe of the same width parameter.
pub fn compare_phases(ell: f64) -> Result<PhasePoint> {
    let a = match find_optimal_disk_scale(ell)? {
        None => {
            return Ok(PhasePoint {
                ell,
                a_opt: None,
                f_disk_min: 0.0,
                f_stripe_at_a_opt: None,
                winner: Winner::Degenerate,
                m_est: None,
            })
        }
        Some(a) => a,
    };
    let fd = f_disk_unchecked(a, ell);
    let fs = f_stripe_unchecked(a, ell);
    let winner = if fs < fd - WIN_GUARD { Winner::Stripe } else { Winner::Disk };
    Ok(PhasePoint { ell, a_opt: Some(a), f_disk_min: fd, f_stripe_at_a_opt: Some(fs), winner, m_est: None })
}

/// One [`PhasePoint`] per entry of `ells`, in input order.
pub fn crossover_scan(ells: &[f64]) -> Result<Vec<PhasePoint>> {
    use rayon::prelude::*;
    ells.par_iter().map(|&l| compare_phases(l)).collect()
}

/// [`crossover_scan`] with `M_est` filled in for every STRIPE row. Rows whose
/// search exceeds the mass cap keep `M_est` empty.
pub fn crossover_scan_with_threshold(ells: &[f64]) -> Result<Vec<PhasePoint>> {
    use rayon::prelude::*;
    ells.par_iter()
        .map(|&l| {
            let mut p = compare_phases(l)?;
            if p.winner == Winner::Stripe {
                match mass_threshold_for(&p) {
                    Ok(m) => p.m_est = Some(m),
                    Err(Error::NotFound(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(p)
        })
        .collect()
}

/// Smallest mass, to relative `1e−9`, at which the stripe `S_{a(l),m}` has
/// lower energy per mass than every disk assembly, `F_{1,0,l}(S)/m < min f_disk`.
///
/// Doubling from `m = 1` up to `1e9`, then bisection.
pub fn mass_threshold(ell: f64) -> Result<f64> {
    let p = compare_phases(ell)?;
    mass_threshold_for(&p)
}

fn mass_threshold_for(p: &PhasePoint) -> Result<f64> {
    let (a, ell) = match (p.winner, p.a_opt) {
        (Winner::Stripe, Some(a)) => (a, p.ell),
        _ => {
            return Err(Error::Precondition(format!(
                "mass threshold needs a STRIPE phase point, got {} at l = {}",
                p.winner, p.ell
            )))
        }
    };
    let beats = |m: f64| stripe_modified_unchecked(a, m, ell) / m < p.f_disk_min;
    let mut hi = 1.0;
    while !beats(hi) {
        hi *= 2.0;
        if hi > MASS_CAP {
            return Err(Error::NotFound(format!("no stripe mass below {MASS_CAP:e} beats disks at l = {ell}")));
        }
    }
    let mut lo = 0.5 * hi;
    if beats(lo) {
        return Ok(lo);
    }
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if beats(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::f_disk;

    #[test]
    fn threshold_constant() {
        assert!((ELL_CRITICAL - 2.0 * (-2f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn optimal_scale_is_stationary() {
        for l in [0.28, 0.5, 1.0, 3.0] {
            let a = find_optimal_disk_scale(l).unwrap().unwrap();
            assert!(disk_slope(a, l).abs() <= SLOPE_TOL, "{l}: {}", disk_slope(a, l));
            let h = 1e-3 * a;
            let curv = f_disk(a + h, l).unwrap() - 2.0 * f_disk(a, l).unwrap() + f_disk(a - h, l).unwrap();
            assert!(curv > 0.0);
        }
    }

    #[test]
    fn scale_shrinks_toward_threshold() {
        let a: Vec<f64> = [0.272, 0.28, 0.35].iter().map(|&l| find_optimal_disk_scale(l).unwrap().unwrap()).collect();
        assert!(a[0] < a[1] && a[1] < a[2], "{a:?}");
    }

    #[test]
    fn unit_ell_has_negative_minimum() {
        let p = compare_phases(1.0).unwrap();
        assert!(p.a_opt.unwrap() > 0.0 && p.f_disk_min < 0.0);
        assert!((p.f_disk_min - f_disk(p.a_opt.unwrap(), 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn stripes_win_just_above_threshold() {
        for off in [0.005, 0.01, 0.02] {
            let p = compare_phases(ELL_CRITICAL + off).unwrap();
            assert_eq!(p.winner, Winner::Stripe, "{off}: {p:?}");
        }
    }

    #[test]
    fn scan_rows() {
        let rows = crossover_scan(&[0.25, 0.2707, 0.28, 0.3, 0.5, 1.0]).unwrap();
        assert_eq!(rows[0].winner, Winner::Degenerate);
        assert_eq!(rows[2].winner, Winner::Stripe);
        assert!(crossover_scan(&[]).unwrap().is_empty());
        let twice = crossover_scan(&[0.3, 0.3]).unwrap();
        assert_eq!(twice[0], twice[1]);
        assert!(crossover_scan(&[-1.0]).is_err());
    }

    #[test]
    fn mass_threshold_is_genuine_and_decreasing() {
        let ms: Vec<f64> = [0.01, 0.02, 0.05]
            .iter()
            .map(|&off| {
                let l = ELL_CRITICAL + off;
                let m = mass_threshold(l).unwrap();
                let p = compare_phases(l).unwrap();
                let a = p.a_opt.unwrap();
                assert!(stripe_modified_unchecked(a, 2.0 * m, l) / (2.0 * m) < p.f_disk_min);
                m
            })
            .collect();
        assert!(ms[0] > ms[1] && ms[1] > ms[2], "{ms:?}");
    }

    #[test]
    fn mass_threshold_rejects_disk_rows() {
        let p = compare_phases(0.2).unwrap();
        assert!(matches!(mass_threshold_for(&p), Err(Error::Precondition(_))));
        assert!(matches!(mass_threshold(0.2), Err(Error::Precondition(_))));
    }

    #[test]
    fn disk_assembly_attains_lower_bound() {
        use crate::energy::gamma_limit_energy_modified;
        use crate::geometry::{make_disk, ShapeConfig};
        use crate::kernels::LayerSeparation;
        let l = 1.0;
        let p = compare_phases(l).unwrap();
        let a = p.a_opt.unwrap();
        let r = 1.0 / a;
        let cfg = ShapeConfig::far_copies(&make_disk(r).unwrap(), 3).unwrap();
        let e = gamma_limit_energy_modified(&cfg.sample(512).unwrap(), LayerSeparation::Finite(l)).unwrap().total;
        let m = 3.0 * std::f64::consts::PI * r * r;
        assert!((e - m * p.f_disk_min).abs() < 1e-6 * (m * p.f_disk_min).abs(), "{e} {}", m * p.f_disk_min);
    }

    #[test]
    fn json_row() {
        let p = compare_phases(0.3).unwrap();
        let v: serde_json::Value = serde_json::to_value(p).unwrap();
        assert_eq!(v["winner"], "STRIPE");
        assert!(v["M_est"].is_null());
    }
}
