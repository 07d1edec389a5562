use super::boundary::energy_boundary;
use super::grid::correlate;
use crate::error::{Error, Result};
use crate::geometry::{make_disk, RasterSet, ShapeConfig};
use crate::kernels::KernelParams;

/// `Δ = E_{λ,δ}(B_{r̃}) + λ/(2|log δ|) ∫_{B_{r̃}} ∫_{Ωᶜ} g_δ(|x−y|)/|x−y|³`, `r̃ = r/2`.
///
/// `Δ < 0` certifies that removing `B_{r̃}(0)` from `Ω` and placing it far away
/// lowers the energy. `E(B_{r̃})` is evaluated on the exact disk. The
/// complement integral is split into unoccupied cells of the window, summed by
/// FFT cross-correlation, and the exterior of the window, integrated exactly.
/// Requires `l = ∞`.
pub fn cut_disk_delta(omega: &RasterSet, r: f64, params: &KernelParams) -> Result<f64> {
    if !params.ell().is_infinite() {
        return Err(Error::Unsupported("disk cutting is defined for l = ∞ only".into()));
    }
    let rt = 0.5 * r;
    if !(rt >= params.delta()) {
        return Err(Error::Precondition(format!("r/2 = {rt} is below δ = {}", params.delta())));
    }
    check_contains_ball(omega, r)?;
    let ball = ShapeConfig::single(make_disk(rt)?)?;
    let own = energy_boundary(&ball.sample_auto()?, params)?.total;
    Ok(own + params.nonlocal_prefactor() * complement_integral(omega, rt, params.delta()))
}

fn check_contains_ball(omega: &RasterSet, r: f64) -> Result<()> {
    let h = omega.h;
    let (x0, y0) = (omega.origin[0], omega.origin[1]);
    let (x1, y1) = (x0 + omega.nx as f64 * h, y0 + omega.ny as f64 * h);
    if x0 > -r || y0 > -r || x1 < r || y1 < r {
        return Err(Error::Precondition(format!("B_{r}(0) extends beyond the raster window")));
    }
    for j in 0..omega.ny {
        for i in 0..omega.nx {
            let c = omega.cell_center(i, j);
            if c[0] * c[0] + c[1] * c[1] <= r * r && !omega.get(i, j) {
                return Err(Error::Precondition(format!("B_{r}(0) is not contained in the set")));
            }
        }
    }
    Ok(())
}

/// `∫_{B_{r̃}} ∫_{Ωᶜ} g_δ/|x−y|³` with `B_{r̃}` resolved on the raster.
pub(crate) fn complement_integral(omega: &RasterSet, rt: f64, delta: f64) -> f64 {
    let (nx, ny, h) = (omega.nx, omega.ny, omega.h);
    let mut ball = vec![false; nx * ny];
    let mut centers = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let c = omega.cell_center(i, j);
            if c[0] * c[0] + c[1] * c[1] <= rt * rt {
                ball[j * nx + i] = true;
                centers.push(c);
            }
        }
    }
    let outside: Vec<bool> = omega.mask.iter().map(|b| !b).collect();
    let inner = correlate(&ball, &outside, nx, ny)
        .weighted_sum(h, |d| if d > delta { 1.0 / (d * d * d) } else { 0.0 });
    let lo = omega.origin;
    let hi = [lo[0] + nx as f64 * h, lo[1] + ny as f64 * h];
    let exterior: f64 = centers.iter().map(|&x| window_exterior(x, lo, hi)).sum();
    h * h * (h * h * inner + exterior)
}

/// `∫_{ℝ² \ R} |x − y|⁻³ dy` for `x` inside the rectangle `R = [lo, hi]`.
///
/// Each ray from `x` leaves `R` through one edge; an edge at distance `d`
/// spanning `t ∈ [t₁, t₂]` contributes `(t₂/√(t₂²+d²) − t₁/√(t₁²+d²))/d`.
fn window_exterior(x: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let edge = |d: f64, t1: f64, t2: f64| (t2 / t2.hypot(d) - t1 / t1.hypot(d)) / d;
    let (t1x, t2x) = (lo[0] - x[0], hi[0] - x[0]);
    let (t1y, t2y) = (lo[1] - x[1], hi[1] - x[1]);
    edge(hi[0] - x[0], t1y, t2y)
        + edge(x[0] - lo[0], t1y, t2y)
        + edge(hi[1] - x[1], t1x, t2x)
        + edge(x[1] - lo[1], t1x, t2x)
}
