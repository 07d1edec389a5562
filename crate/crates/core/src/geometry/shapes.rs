use std::f64::consts::PI;

use rand::Rng;

use super::curve::JordanCurve;
use crate::error::{Error, Result};

/// Samples used to build the Fourier series of a rounded rectangle.
const RECT_SAMPLES: usize = 1 << 16;

/// Smoothing length for sharp corners, relative to the short side.
const SHARP_SMOOTHING: f64 = 0.01;

/// Circle of radius `r` centred at the origin.
pub fn make_disk(r: f64) -> Result<JordanCurve> {
    make_ellipse(r, r)
}

/// Axis-aligned ellipse with semi-axes `a` (along x) and `b`.
pub fn make_ellipse(a: f64, b: f64) -> Result<JordanCurve> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("semi-axes must be > 0, got ({a}, {b})")));
    }
    JordanCurve::from_coefficients(vec![0.0, a], vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, b])
}

/// The rectangle `(−am/2, am/2) × (−1/(2a), 1/(2a))` with corners rounded to
/// radius `rho`, as a Fourier curve of area exactly `m`.
///
/// The arclength-sampled outline is Gaussian-filtered with width `rho/4`
/// (`0.01 × short side` when `rho = 0`) and then dilated about its centre to
/// restore the area. With `rho = 0` the result approximates the sharp
/// rectangle and is not suitable for curvature-sensitive evaluators.
pub fn make_stripe(a: f64, m: f64, rho: f64) -> Result<JordanCurve> {
    if !(a > 0.0 && m > 0.0 && a.is_finite() && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("stripe needs a, m > 0, got ({a}, {m})")));
    }
    let width = a * m;
    let height = 1.0 / a;
    let short = width.min(height);
    if !(rho >= 0.0) || rho >= short / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "corner radius must lie in [0, {}), got {rho}",
            short / 2.0
        )));
    }
    let eps = if rho > 0.0 { rho / 4.0 } else { SHARP_SMOOTHING * short };
    let outline = RoundedRect::new(width, height, rho);
    let n = RECT_SAMPLES;
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| outline.point(outline.perimeter * i as f64 / n as f64))
        .collect();
    let p = outline.perimeter;
    let filter = |k: usize| (-0.5 * (2.0 * PI * k as f64 * eps / p).powi(2)).exp();
    // keep modes while the filter is above 1e-16
    let kmax = ((2.0 * 36.84f64).sqrt() * p / (2.0 * PI * eps)).ceil() as usize;
    let curve = JordanCurve::from_samples(&pts, kmax.min(n / 2 - 1), filter)?;
    let area = curve.enclosed_area()?;
    Ok(curve.dilated_about_center((m / area).sqrt()))
}

/// Star-shaped curve `r(θ) = 1 + Σ_{k=2}^{K} a_k cos kθ + b_k sin kθ` with
/// `a_k, b_k` uniform in `[−amplitude/k, amplitude/k]`.
///
/// Requires `amplitude·(H_K − 1) < 1` so that `r > 0`; the result is then
/// simple and band-limited to mode `K + 1`.
pub fn random_band_limited<R: Rng + ?Sized>(rng: &mut R, modes: usize, amplitude: f64) -> Result<JordanCurve> {
    let worst: f64 = (2..=modes).map(|k| 2.0 * amplitude / k as f64).sum();
    if modes < 2 || !(amplitude >= 0.0) || worst >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "need modes ≥ 2 and a positive radius, got modes {modes}, amplitude {amplitude}"
        )));
    }
    let len = modes + 2;
    let (mut cx, mut sx, mut cy, mut sy) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    cx[1] = 1.0;
    sy[1] = 1.0;
    for k in 2..=modes {
        let bound = amplitude / k as f64;
        let a = rng.gen_range(-bound..=bound);
        let b = rng.gen_range(-bound..=bound);
        // r·cos θ and r·sin θ by product-to-sum
        cx[k + 1] += 0.5 * a;
        cx[k - 1] += 0.5 * a;
        sx[k + 1] += 0.5 * b;
        sx[k - 1] += 0.5 * b;
        sy[k + 1] += 0.5 * a;
        sy[k - 1] -= 0.5 * a;
        cy[k - 1] += 0.5 * b;
        cy[k + 1] -= 0.5 * b;
    }
    JordanCurve::from_coefficients(cx, sx, cy, sy)
}

struct RoundedRect {
    hw: f64,
    hh: f64,
    rho: f64,
    pieces: Vec<Piece>,
    perimeter: f64,
}

#[derive(Clone, Copy)]
enum Piece {
    Line { from: [f64; 2], dir: [f64; 2], len: f64 },
    Arc { center: [f64; 2], start: f64, len: f64 },
}

impl RoundedRect {
    fn new(width: f64, height: f64, rho: f64) -> Self {
        let (hw, hh) = (width / 2.0, height / 2.0);
        let quarter = 0.5 * PI * rho;
        let pieces = vec![
            Piece::Line { from: [hw, 0.0], dir: [0.0, 1.0], len: hh - rho },
            Piece::Arc { center: [hw - rho, hh - rho], start: 0.0, len: quarter },
            Piece::Line { from: [hw - rho, hh], dir: [-1.0, 0.0], len: width - 2.0 * rho },
            Piece::Arc { center: [-hw + rho, hh - rho], start: 0.5 * PI, len: quarter },
            Piece::Line { from: [-hw, hh - rho], dir: [0.0, -1.0], len: height - 2.0 * rho },
            Piece::Arc { center: [-hw + rho, -hh + rho], start: PI, len: quarter },
            Piece::Line { from: [-hw + rho, -hh], dir: [1.0, 0.0], len: width - 2.0 * rho },
            Piece::Arc { center: [hw - rho, -hh + rho], start: 1.5 * PI, len: quarter },
            Piece::Line { from: [hw, -hh + rho], dir: [0.0, 1.0], len: hh - rho },
        ];
        let perimeter = pieces
            .iter()
            .map(|p| match p {
                Piece::Line { len, .. } | Piece::Arc { len, .. } => *len,
            })
            .sum();
        Self { hw, hh, rho, pieces, perimeter }
    }

    fn point(&self, mut s: f64) -> [f64; 2] {
        for p in &self.pieces {
            match *p {
                Piece::Line { from, dir, len } => {
                    if s <= len {
                        return [from[0] + s * dir[0], from[1] + s * dir[1]];
                    }
                    s -= len;
                }
                Piece::Arc { center, start, len } => {
                    if s <= len {
                        let th = start + s / self.rho;
                        return [center[0] + self.rho * th.cos(), center[1] + self.rho * th.sin()];
                    }
                    s -= len;
                }
            }
        }
        [self.hw, self.hh.min(s)]
    }
}
