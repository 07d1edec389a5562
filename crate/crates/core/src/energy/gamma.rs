use std::f64::consts::PI;

use super::near::chord_table;
use super::{dist, dot, ordered_sum, EnergyBreakdown, Evaluator};
use crate::error::{Error, Result};
use crate::geometry::{SampledCurve, SampledShape, ShapeConfig};
use crate::kernels::LayerSeparation;

/// `E_{1,0}` of a union of C² Jordan curves.
///
/// ```text
/// E_{1,0} = −Σ Pᵢ[log(Pᵢ/2) + 2] + ½ Σ ∮∮ (1/|s| − ν(t+s)·ν(t)/|Δγ|) ds dt
///           − Σ_{i<j} ∮∮ νⱼ·νᵢ/|γⱼ − γᵢ|
/// ```
///
/// `perimeter_term` holds the first sum. Cross terms of far-separated pairs are
/// dropped.
pub fn gamma_limit_energy(shape: &SampledShape) -> Result<EnergyBreakdown> {
    check_contact(shape)?;
    let mut local = 0.0;
    let mut nonlocal = 0.0;
    for c in &shape.components {
        let p = c.curve.perimeter;
        local -= p * ((0.5 * p).ln() + 2.0);
        nonlocal += 0.5 * self_term(&c.curve);
    }
    for (i, j) in shape.interacting_pairs() {
        nonlocal -= cross_integral(&shape.components[i].curve, &shape.components[j].curve, |r| {
            1.0 / r
        })?;
    }
    Ok(EnergyBreakdown::new(local, nonlocal, Evaluator::GammaLimit, None))
}

/// `F_{1,0,l} = E_{1,0} + ½ ∮∮ ν(x)·ν(y)/√(|x−y|² + l²)`; equals
/// [`gamma_limit_energy`] for `l = ∞`.
pub fn gamma_limit_energy_modified(
    shape: &SampledShape,
    ell: LayerSeparation,
) -> Result<EnergyBreakdown> {
    let base = gamma_limit_energy(shape)?;
    let l = match ell {
        LayerSeparation::Infinite => {
            let mut b = base;
            b.evaluator = Evaluator::GammaLimitModified;
            b.ell = Some(ell);
            return Ok(b);
        }
        LayerSeparation::Finite(l) => l,
    };
    let mut corr = 0.0;
    for c in &shape.components {
        corr += 0.5 * layer_self(&c.curve, l);
    }
    for (i, j) in shape.interacting_pairs() {
        // both orderings of the pair
        corr += cross_integral(&shape.components[i].curve, &shape.components[j].curve, |r| {
            1.0 / (r * r + l * l).sqrt()
        })?;
    }
    let mut b = EnergyBreakdown::new(
        base.perimeter_term,
        base.nonlocal_term + corr,
        Evaluator::GammaLimitModified,
        None,
    );
    b.ell = Some(ell);
    Ok(b)
}

/// [`gamma_limit_energy`] at the recommended node counts.
pub fn gamma_limit_energy_config(config: &ShapeConfig) -> Result<EnergyBreakdown> {
    gamma_limit_energy(&config.sample_auto()?)
}

pub fn gamma_limit_energy_modified_config(
    config: &ShapeConfig,
    ell: LayerSeparation,
) -> Result<EnergyBreakdown> {
    gamma_limit_energy_modified(&config.sample_auto()?, ell)
}

/// `∮∮ (1/|s| − ν·ν/|Δγ|)` with `1/|s|` split as `1/σ + (1/|s| − 1/σ)`; the
/// second part integrates to `2 log(π/4)` per unit `t`. The remaining
/// integrand behaves like `c(t)|s|` at the diagonal, `c = (11κ² + κ₀²)/24`,
/// and `c σ` is subtracted and added back exactly.
fn self_term(c: &SampledCurve) -> f64 {
    let n = c.len();
    let p = c.perimeter;
    let ds = c.ds;
    let sigma = chord_table(p, n);
    let k0sq = (2.0 * PI / p).powi(2);
    let sigma_int = 2.0 * p * p / (PI * PI);
    let rows = ordered_sum(n, |i| {
        let ci = (11.0 * c.curvature[i].powi(2) + k0sq) / 24.0;
        let (xi, ni) = (c.points[i], c.normals[i]);
        let mut acc = 0.0;
        for k in 1..n {
            let j = (i + k) % n;
            let r = dist(c.points[j], xi);
            acc += 1.0 / sigma[k] - dot(ni, c.normals[j]) / r - ci * sigma[k];
        }
        acc * ds * ds + ci * sigma_int * ds
    });
    rows + 2.0 * p * (PI / 4.0).ln()
}

/// `∮∮ ν·ν/√(r² + l²)` over one curve, diagonal included.
pub(crate) fn layer_self(c: &SampledCurve, l: f64) -> f64 {
    let n = c.len();
    let ds = c.ds;
    ordered_sum(n, |i| {
        let (xi, ni) = (c.points[i], c.normals[i]);
        let mut acc = 0.0;
        for j in 0..n {
            let r = dist(c.points[j], xi);
            acc += dot(ni, c.normals[j]) / (r * r + l * l).sqrt();
        }
        acc * ds * ds
    })
}

/// `2 ∮_a ∮_b ν·ν f(|x − y|)` (both orderings of the pair).
pub(crate) fn cross_integral<F: Fn(f64) -> f64 + Sync>(
    a: &SampledCurve,
    b: &SampledCurve,
    f: F,
) -> Result<f64> {
    let coincident = a.points.iter().any(|p| b.points.iter().any(|q| dist(*p, *q) == 0.0));
    if coincident {
        return Err(Error::Precondition("coincident nodes on distinct components".into()));
    }
    let w = a.ds * b.ds;
    Ok(2.0
        * ordered_sum(a.len(), |i| {
            let (xi, ni) = (a.points[i], a.normals[i]);
            let mut acc = 0.0;
            for j in 0..b.len() {
                acc += dot(ni, b.normals[j]) * f(dist(b.points[j], xi));
            }
            acc * w
        }))
}

/// Rejects distances below `10·ds` between nodes more than `P/4` apart.
fn check_contact(shape: &SampledShape) -> Result<()> {
    for comp in &shape.components {
        let c = &comp.curve;
        let n = c.len();
        let threshold = 10.0 * c.ds;
        let mut worst = f64::INFINITY;
        for i in 0..n {
            for k in n / 4 + 1..n - n / 4 {
                let j = (i + k) % n;
                worst = worst.min(dist(c.points[i], c.points[j]));
            }
        }
        if worst < threshold {
            let suggested = ((n as f64) * threshold / worst).ceil() as usize;
            return Err(Error::NearContact { distance: worst, threshold, suggested_nodes: suggested });
        }
    }
    Ok(())
}
