use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{EnergyBreakdown, Evaluator};
use crate::error::{Error, Result};
use crate::geometry::RasterSet;
use crate::kernels::{layer_kernel, KernelParams, LayerSeparation};

/// Radius, in cells, of the explicit lattice sum in [`lattice_mass`].
const LATTICE_RADIUS: i64 = 400;

/// `F = P − λ/(2|log δ|) ∫_Ω ∫_{Ωᶜ} K_{δ,l}` on a raster.
///
/// The complement integral is `m ∫K − ∫_Ω∫_Ω K`. Both parts use the same
/// midpoint lattice rule, so the large `m·2π/δ` contributions cancel to
/// rounding and only the boundary layer survives. Pair counts per lattice
/// offset come from a zero-padded FFT autocorrelation, rounded to integers.
pub fn energy_grid(raster: &RasterSet, perimeter: f64, params: &KernelParams) -> Result<EnergyBreakdown> {
    let h = raster.h;
    if h > 0.25 * params.delta() {
        return Err(Error::InvalidParameter(format!(
            "grid spacing {h} exceeds δ/4 = {}",
            0.25 * params.delta()
        )));
    }
    let n = raster.count();
    if n == 0 {
        return Ok(EnergyBreakdown::new(0.0, 0.0, Evaluator::Grid, Some(*params)));
    }
    let pref = params.nonlocal_prefactor();
    if pref == 0.0 {
        return Ok(EnergyBreakdown::new(perimeter, 0.0, Evaluator::Grid, Some(*params)));
    }
    let counts = correlate(&raster.mask, &raster.mask, raster.nx, raster.ny);
    let kernel = |r: f64| lattice_kernel(r, params.delta(), params.ell());
    let inner = counts.weighted_sum(h, kernel);
    let cross = h * h * (n as f64 * lattice_mass(h, params) - h * h * inner);
    Ok(EnergyBreakdown::new(perimeter, -pref * cross, Evaluator::Grid, Some(*params)))
}

/// `K_{δ,l}` extended to `r = 0` by its layered part.
#[inline]
pub(crate) fn lattice_kernel(r: f64, delta: f64, ell: LayerSeparation) -> f64 {
    let sharp = if r > delta { 1.0 / (r * r * r) } else { 0.0 };
    sharp + layer_kernel(r, ell)
}

/// `∫_{ℝ²} K_{δ,l}` under the midpoint rule of spacing `h`: explicit lattice
/// sum out to [`LATTICE_RADIUS`] cells, exact integral beyond.
fn lattice_mass(h: f64, params: &KernelParams) -> f64 {
    let (delta, ell) = (params.delta(), params.ell());
    let mut sum = 0.0;
    let mut points = 0usize;
    for j in -LATTICE_RADIUS..=LATTICE_RADIUS {
        let mut row = 0.0;
        for i in -LATTICE_RADIUS..=LATTICE_RADIUS {
            if i * i + j * j > LATTICE_RADIUS * LATTICE_RADIUS {
                continue;
            }
            points += 1;
            row += lattice_kernel(h * ((i * i + j * j) as f64).sqrt(), delta, ell);
        }
        sum += row;
    }
    // radius of the disk whose area matches the lattice points used
    let r = h * (points as f64 / PI).sqrt();
    let tail = 2.0 * PI / r
        + match ell {
            LayerSeparation::Infinite => 0.0,
            LayerSeparation::Finite(l) => -2.0 * PI * r * r / (r * r + l * l).powf(1.5),
        };
    h * h * sum + tail
}

/// Pair counts `C(o) = #{x : a(x) ∧ b(x + o)}` over lattice offsets `o`.
pub(crate) struct Correlation {
    counts: Vec<f64>,
    px: usize,
    py: usize,
    nx: usize,
    ny: usize,
}

impl Correlation {
    /// Offset `(dx, dy)` of padded index `(ix, iy)`, if representable.
    fn offset(&self, ix: usize, iy: usize) -> Option<(i64, i64)> {
        let dx = if ix < self.nx { ix as i64 } else { ix as i64 - self.px as i64 };
        let dy = if iy < self.ny { iy as i64 } else { iy as i64 - self.py as i64 };
        (dx.unsigned_abs() < self.nx as u64 && dy.unsigned_abs() < self.ny as u64).then_some((dx, dy))
    }

    /// `Σ_o C(o) f(h|o|)`, summed in index order.
    pub(crate) fn weighted_sum<F: Fn(f64) -> f64>(&self, h: f64, f: F) -> f64 {
        let mut total = 0.0;
        for iy in 0..self.py {
            let mut row = 0.0;
            for ix in 0..self.px {
                let c = self.counts[iy * self.px + ix];
                if c == 0.0 {
                    continue;
                }
                if let Some((dx, dy)) = self.offset(ix, iy) {
                    row += c * f(h * ((dx * dx + dy * dy) as f64).sqrt());
                }
            }
            total += row;
        }
        total
    }
}

/// Zero-padded FFT cross-correlation of two row-major masks of size `nx × ny`.
pub(crate) fn correlate(a: &[bool], b: &[bool], nx: usize, ny: usize) -> Correlation {
    let (px, py) = (2 * nx, 2 * ny);
    let load = |m: &[bool]| {
        let mut buf = vec![Complex::new(0.0, 0.0); px * py];
        for j in 0..ny {
            for i in 0..nx {
                if m[j * nx + i] {
                    buf[j * px + i].re = 1.0;
                }
            }
        }
        buf
    };
    let mut planner = FftPlanner::new();
    let mut fa = load(a);
    fft2(&mut planner, &mut fa, px, py, false);
    let mut fb = if std::ptr::eq(a, b) {
        fa.clone()
    } else {
        let mut fb = load(b);
        fft2(&mut planner, &mut fb, px, py, false);
        fb
    };
    for (x, y) in fb.iter_mut().zip(&fa) {
        *x *= y.conj();
    }
    fft2(&mut planner, &mut fb, px, py, true);
    let scale = 1.0 / (px * py) as f64;
    let counts = fb.iter().map(|z| (z.re * scale).round()).collect();
    Correlation { counts, px, py, nx, ny }
}

fn fft2(planner: &mut FftPlanner<f64>, buf: &mut [Complex<f64>], px: usize, py: usize, inverse: bool) {
    let rows = if inverse { planner.plan_fft_inverse(px) } else { planner.plan_fft_forward(px) };
    for row in buf.chunks_exact_mut(px) {
        rows.process(row);
    }
    let cols = if inverse { planner.plan_fft_inverse(py) } else { planner.plan_fft_forward(py) };
    let mut col = vec![Complex::new(0.0, 0.0); py];
    for i in 0..px {
        for j in 0..py {
            col[j] = buf[j * px + i];
        }
        cols.process(&mut col);
        for j in 0..py {
            buf[j * px + i] = col[j];
        }
    }
}
