//! Area-preserving descent of `F_{λ,δ,l}` for a single smooth component.
//!
//! Stationary points satisfy `κ + 2v − μ = 0` on the boundary. The flow moves
//! nodes with normal velocity `V = −(κ + 2v − μ)`, refits a band-limited
//! Fourier curve through the moved nodes, dilates it back to the prescribed
//! area and resamples by arclength. A step is accepted only if the boundary
//! energy does not increase; otherwise `dt` is halved.

use serde::Serialize;

use crate::energy::{boundary_potential, energy_boundary, Evaluator};
use crate::error::{Error, Result};
use crate::geometry::{sample_arclength, JordanCurve, SampledCurve, SampledShape, ShapeConfig};
use crate::kernels::KernelParams;

/// Halvings of `dt` tried before a step is declared stalled.
const MAX_HALVINGS: usize = 40;

/// Normal velocity `V = −(κ + 2v − μ)` at every node and the multiplier
/// `μ = ∮(κ + 2v)/P`, so that `∮V = 0`.
pub fn shape_gradient(curve: &SampledCurve, params: &KernelParams) -> Result<(Vec<f64>, f64)> {
    curve.check_simple()?;
    let shape = SampledShape::from_curves(vec![curve.clone()], false);
    let v = boundary_potential(&shape, params)?.swap_remove(0);
    let drive: Vec<f64> = curve.curvature.iter().zip(&v).map(|(k, v)| k + 2.0 * v).collect();
    let mu = drive.iter().sum::<f64>() / drive.len() as f64;
    Ok((drive.iter().map(|d| mu - d).collect(), mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Arclength nodes per step.
    pub nodes: usize,
    /// Highest Fourier mode kept when refitting.
    pub max_mode: usize,
    pub max_steps: usize,
    /// Initial step; `None` uses `0.2·ds²`.
    pub dt0: Option<f64>,
    /// Factor applied to `dt` after each accepted step. Growth stops at
    /// `(P/(2π·max_mode))²`, where the highest retained mode stops being
    /// damped monotonically.
    pub dt_growth: f64,
    /// Stop once `max|κ + 2v − μ| ≤ tol`.
    pub tol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { nodes: 256, max_mode: 16, max_steps: 20_000, dt0: None, dt_growth: 1.2, tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FlowStatus {
    Converged,
    MaxSteps,
    /// No step size down to `dt0·2⁻⁴⁰` decreased the energy.
    Stalled,
    /// Every trial step self-intersected; the state is the last valid one.
    SelfIntersection,
}

/// One accepted state of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub energy: f64,
    pub residual: f64,
    pub area: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub curve: JordanCurve,
    pub sampled: SampledCurve,
    pub step: usize,
    pub dt: f64,
    pub mu: f64,
    pub trace: Vec<TraceRow>,
    pub status: FlowStatus,
}

impl FlowState {
    pub fn energy(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.energy)
    }

    pub fn residual(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.residual)
    }
}

fn single_energy(s: &SampledCurve, params: &KernelParams) -> Result<f64> {
    Ok(energy_boundary(&SampledShape::from_curves(vec![s.clone()], false), params)?.total)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Moves the nodes by `dt·V·ν`, refits, restores the area and resamples.
fn advance(
    s: &SampledCurve,
    vel: &[f64],
    dt: f64,
    mass: f64,
    opts: &FlowOptions,
) -> Result<(JordanCurve, SampledCurve)> {
    let moved: Vec<[f64; 2]> = s
        .points
        .iter()
        .zip(&s.normals)
        .zip(vel)
        .map(|((p, n), v)| [p[0] + dt * v * n[0], p[1] + dt * v * n[1]])
        .collect();
    let c = JordanCurve::from_samples(&moved, opts.max_mode, |_| 1.0)?;
    let area = c.enclosed_area()?;
    let c = c.dilated_about_center((mass / area).sqrt());
    let cs = sample_arclength(&c, opts.nodes)?;
    cs.check_simple()?;
    Ok((c, cs))
}

/// Runs the flow from the single component of `initial`.
///
/// Only [`Evaluator::Boundary`] is supported as the descent energy.
pub fn gradient_flow(
    initial: &ShapeConfig,
    params: &KernelParams,
    evaluator: Evaluator,
    opts: &FlowOptions,
) -> Result<FlowState> {
    if evaluator != Evaluator::Boundary {
        return Err(Error::Unsupported(format!("gradient flow with the {evaluator} evaluator")));
    }
    let placed = initial.placed_curves();
    if placed.len() != 1 {
        return Err(Error::Precondition(format!(
            "gradient flow needs exactly one component, got {}",
            placed.len()
        )));
    }
    if opts.nodes < 16 || opts.max_mode == 0 || !(opts.tol > 0.0) || !(opts.dt_growth >= 1.0) {
        return Err(Error::InvalidParameter("invalid flow options".into()));
    }
    let mut curve = placed.into_iter().next().expect("one component").0;
    let mass = curve.enclosed_area()?;
    let mut s = sample_arclength(&curve, opts.nodes)?;
    let (mut vel, mut mu) = shape_gradient(&s, params)?;
    let mut energy = single_energy(&s, params)?;
    let mut dt = opts.dt0.unwrap_or(0.2 * s.ds * s.ds);
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt0 must be positive, got {dt}")));
    }
    let mut trace = vec![TraceRow { step: 0, energy, residual: max_abs(&vel), area: mass, dt }];
    let mut status = FlowStatus::MaxSteps;
    let mut step = 0;
    while step < opts.max_steps {
        if max_abs(&vel) <= opts.tol {
            status = FlowStatus::Converged;
            break;
        }
        let mut accepted = None;
        let mut intersected = false;
        for _ in 0..MAX_HALVINGS {
            match advance(&s, &vel, dt, mass, opts) {
                Ok((c, cs)) => {
                    let e = single_energy(&cs, params)?;
                    if e <= energy {
                        accepted = Some((c, cs, e));
                        break;
                    }
                    intersected = false;
                }
                Err(Error::SelfIntersection(..)) => intersected = true,
                Err(Error::Orientation(_)) | Err(Error::DegenerateCurve(_)) => {}
                Err(e) => return Err(e),
            }
            dt *= 0.5;
        }
        let Some((c, cs, e)) = accepted else {
            status = if intersected { FlowStatus::SelfIntersection } else { FlowStatus::Stalled };
            break;
        };
        step += 1;
        curve = c;
        s = cs;
        energy = e;
        (vel, mu) = shape_gradient(&s, params)?;
        trace.push(TraceRow { step, energy, residual: max_abs(&vel), area: curve.enclosed_area()?, dt });
        let wave = 2.0 * std::f64::consts::PI * opts.max_mode as f64 / s.perimeter;
        dt = (dt * opts.dt_growth).min(dt.max(1.0 / (wave * wave)));
    }
    if status == FlowStatus::MaxSteps && max_abs(&vel) <= opts.tol {
        status = FlowStatus::Converged;
    }
    Ok(FlowState { curve, sampled: s, step, dt, mu, trace, status })
}

/// `max κ − min κ` over the nodes.
pub fn osc_curvature(curve: &SampledCurve) -> f64 {
    let (lo, hi) = curve
        .curvature
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| (lo.min(k), hi.max(k)));
    hi - lo
}

/// Comparison of a closed curve with the circle of equal perimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigidityReport {
    pub osc_kappa: f64,
    pub radius: f64,
    pub center: [f64; 2],
    pub phase: f64,
    pub max_position_deviation: f64,
    pub position_bound: f64,
    pub max_tangent_deviation: f64,
    pub tangent_bound: f64,
    pub holds: bool,
}

/// Fits `c + R(cos(s/R + φ), sin(s/R + φ))`, `R = P/(2π)`, with `c` the node
/// centroid and `φ` the phase of the first arclength Fourier mode, and checks
///
/// ```text
/// max|γ − circle| ≤ (P²/4) osc κ,   max|γ̇ − circle′| ≤ (P/2) osc κ
/// ```
///
/// up to `1e−9·P` of rounding slack.
pub fn circle_rigidity_check(curve: &SampledCurve) -> RigidityReport {
    let n = curve.len();
    let p = curve.perimeter;
    let r = p / (2.0 * std::f64::consts::PI);
    let osc = osc_curvature(curve);
    let mut c = [0.0, 0.0];
    for q in &curve.points {
        c[0] += q[0] / n as f64;
        c[1] += q[1] / n as f64;
    }
    // Σ (γ − c) e^{−i s/R}
    let (mut re, mut im) = (0.0, 0.0);
    for (j, q) in curve.points.iter().enumerate() {
        let th = j as f64 * curve.ds / r;
        let (x, y) = (q[0] - c[0], q[1] - c[1]);
        re += x * th.cos() + y * th.sin();
        im += y * th.cos() - x * th.sin();
    }
    let phase = im.atan2(re);
    let (mut dpos, mut dtan) = (0.0f64, 0.0f64);
    for j in 0..n {
        let th = j as f64 * curve.ds / r + phase;
        let (cs, sn) = (th.cos(), th.sin());
        let q = curve.points[j];
        let t = curve.tangents[j];
        dpos = dpos.max((q[0] - c[0] - r * cs).hypot(q[1] - c[1] - r * sn));
        dtan = dtan.max((t[0] + sn).hypot(t[1] - cs));
    }
    let position_bound = 0.25 * p * p * osc;
    let tangent_bound = 0.5 * p * osc;
    let slack = 1e-9 * p;
    RigidityReport {
        osc_kappa: osc,
        radius: r,
        center: c,
        phase,
        max_position_deviation: dpos,
        position_bound,
        max_tangent_deviation: dtan,
        tangent_bound,
        holds: dpos <= position_bound + slack && dtan <= tangent_bound + slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk, make_ellipse};
    use crate::kernels::LayerSeparation;
    use std::f64::consts::PI;

    fn params(lambda: f64, delta: f64) -> KernelParams {
        KernelParams::new(lambda, delta, LayerSeparation::Infinite).unwrap()
    }

    #[test]
    fn circle_is_stationary() {
        let s = sample_arclength(&make_disk(1.0).unwrap(), 128).unwrap();
        for p in [params(0.5, 1e-3), KernelParams::new(1.0, 0.01, LayerSeparation::Finite(2.0)).unwrap()] {
            let (v, _) = shape_gradient(&s, &p).unwrap();
            assert!(max_abs(&v) < 1e-6);
        }
    }

    #[test]
    fn lambda_zero_is_curvature_flow() {
        let s = sample_arclength(&make_ellipse(2.0, 1.0).unwrap(), 256).unwrap();
        let (v, mu) = shape_gradient(&s, &params(0.0, 0.01)).unwrap();
        assert!((mu - 2.0 * PI / s.perimeter).abs() < 1e-10);
        for (vi, k) in v.iter().zip(&s.curvature) {
            assert!((vi + k - 2.0 * PI / s.perimeter).abs() < 1e-10);
        }
        // node 0 sits at the tip (2, 0); a quarter turn later is the flat point (0, 1)
        assert!(v[0] < 0.0 && v[64] > 0.0);
    }

    #[test]
    fn circle_converges_immediately() {
        let cfg = ShapeConfig::single(make_disk(1.0).unwrap()).unwrap();
        let f = gradient_flow(&cfg, &params(0.5, 1e-3), Evaluator::Boundary, &FlowOptions::default()).unwrap();
        assert_eq!(f.status, FlowStatus::Converged);
        assert_eq!(f.trace.len(), 1);
    }

    #[test]
    fn curvature_flow_rounds_an_ellipse() {
        let cfg = ShapeConfig::single(make_ellipse(1.5f64.sqrt(), 1.0 / 1.5f64.sqrt()).unwrap()).unwrap();
        let opts = FlowOptions { nodes: 128, max_mode: 16, ..FlowOptions::default() };
        let f = gradient_flow(&cfg, &params(0.0, 0.01), Evaluator::Boundary, &opts).unwrap();
        assert_eq!(f.status, FlowStatus::Converged, "{:?}", f.trace.last());
        assert!(f.trace.windows(2).all(|w| w[1].energy <= w[0].energy));
        assert!(f.trace.iter().all(|r| (r.area - PI).abs() < 1e-10 * PI));
        assert!((f.energy() - 2.0 * PI).abs() < 1e-5);
        assert!(osc_curvature(&f.sampled) < 1e-2);
    }

    #[test]
    fn translation_equivariant() {
        let e = make_ellipse(1.3, 0.8).unwrap();
        let opts = FlowOptions { nodes: 128, max_mode: 16, max_steps: 15, ..FlowOptions::default() };
        let p = params(0.5, 1e-2);
        let a = gradient_flow(&ShapeConfig::single(e.clone()).unwrap(), &p, Evaluator::Boundary, &opts).unwrap();
        let b = gradient_flow(&ShapeConfig::single(e.translated(3.0, -2.0)).unwrap(), &p, Evaluator::Boundary, &opts)
            .unwrap();
        assert_eq!(a.step, b.step);
        for (x, y) in a.sampled.points.iter().zip(&b.sampled.points) {
            assert!((x[0] + 3.0 - y[0]).abs() < 1e-9 && (x[1] - 2.0 - y[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_other_evaluators_and_multiple_components() {
        let cfg = ShapeConfig::single(make_disk(1.0).unwrap()).unwrap();
        let p = params(0.5, 1e-2);
        let o = FlowOptions::default();
        assert!(matches!(gradient_flow(&cfg, &p, Evaluator::Grid, &o), Err(Error::Unsupported(_))));
        let two = ShapeConfig::far_copies(&make_disk(1.0).unwrap(), 2).unwrap();
        assert!(matches!(gradient_flow(&two, &p, Evaluator::Boundary, &o), Err(Error::Precondition(_))));
    }

    #[test]
    fn rigidity_circle_and_ellipse() {
        let c = circle_rigidity_check(&sample_arclength(&make_disk(1.0).unwrap(), 128).unwrap());
        assert!(c.osc_kappa < 1e-12 && c.holds);
        assert!(c.max_position_deviation < 1e-12 && c.max_tangent_deviation < 1e-12);
        let e = circle_rigidity_check(&sample_arclength(&make_ellipse(2.0, 1.0).unwrap(), 512).unwrap());
        assert!((e.osc_kappa - 1.75).abs() < 1e-9);
        assert!(e.holds, "{e:?}");
    }

    #[test]
    fn rigidity_small_perturbation() {
        let base = make_disk(1.0).unwrap();
        let mut cx = base.cos_x.clone();
        let mut sx = base.sin_x.clone();
        let mut cy = base.cos_y.clone();
        let mut sy = base.sin_y.clone();
        cx.resize(6, 0.0);
        sx.resize(6, 0.0);
        cy.resize(6, 0.0);
        sy.resize(6, 0.0);
        cx[3] = 1e-3;
        sy[5] = -1e-3;
        cy[2] = 5e-4;
        let c = JordanCurve::from_coefficients(cx, sx, cy, sy).unwrap();
        let r = circle_rigidity_check(&sample_arclength(&c, 256).unwrap());
        assert!(r.holds, "{r:?}");
        assert!(r.max_position_deviation <= r.position_bound && r.max_tangent_deviation <= r.tangent_bound);
    }
}
