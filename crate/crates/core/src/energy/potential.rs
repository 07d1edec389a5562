use std::f64::consts::PI;

use super::near::{chord_table, NearIntegrals};
use super::{dist, dot};
use crate::error::{Error, Result};
use crate::geometry::{SampledCurve, SampledShape};
use crate::kernels::{phi_delta_prime_unchecked, KernelParams, LayerSeparation};

/// `v(x) = λ/(2|log δ|) ∫_Ω K_{δ,l}(|x − y|) dy` at every boundary node.
///
/// On the boundary the volume integral equals `∮ ∇Φ_{δ,l}(y − x)·ν(y) + π/δ`;
/// the constant is half the kernel mass because `x` sees a half-plane of `Ω`
/// at small scales. The principal-value integrand tends to `−κ/(2δ)` at
/// `y = x`; the model `(κ/2) σ Φ_δ'(σ)` is subtracted and integrated exactly.
pub fn boundary_potential(shape: &SampledShape, params: &KernelParams) -> Result<Vec<Vec<f64>>> {
    let pref = params.nonlocal_prefactor();
    let delta = params.delta();
    let mut out = Vec::with_capacity(shape.components.len());
    for (ci, comp) in shape.components.iter().enumerate() {
        let c = &comp.curve;
        let n = c.len();
        let sigma = chord_table(c.perimeter, n);
        let model: Vec<f64> = sigma
            .iter()
            .map(|&s| if s > 0.0 { s * phi_delta_prime_unchecked(s, delta) } else { 0.0 })
            .collect();
        let near = NearIntegrals::new(c.perimeter, delta);
        let others: Vec<&SampledCurve> = if comp.far {
            Vec::new()
        } else {
            shape
                .components
                .iter()
                .enumerate()
                .filter(|(j, o)| *j != ci && !o.far)
                .map(|(_, o)| &o.curve)
                .collect()
        };
        let ell = params.ell();
        let values: Vec<f64> = {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = c.points[i];
                    let half_k = 0.5 * c.curvature[i];
                    let mut acc = 0.0;
                    for k in 1..n {
                        let j = (i + k) % n;
                        acc += flux(x, c.points[j], c.normals[j], delta, ell) - half_k * model[k];
                    }
                    let mut total = acc * c.ds + half_k * near.sigma_dphi;
                    for o in &others {
                        let mut cross = 0.0;
                        for j in 0..o.len() {
                            cross += flux(x, o.points[j], o.normals[j], delta, ell);
                        }
                        total += cross * o.ds;
                    }
                    pref * (total + PI / delta)
                })
                .collect()
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("coincident nodes in potential evaluation".into()));
        }
        out.push(values);
    }
    Ok(out)
}

/// `∇_y Φ_{δ,l}(|y − x|)·ν(y)`.
#[inline]
fn flux(x: [f64; 2], y: [f64; 2], nu: [f64; 2], delta: f64, ell: LayerSeparation) -> f64 {
    let d = [y[0] - x[0], y[1] - x[1]];
    let r = dist(y, x);
    let proj = dot(d, nu);
    let layer = match ell {
        LayerSeparation::Finite(l) => {
            let q = r * r + l * l;
            1.0 / (q * q.sqrt())
        }
        LayerSeparation::Infinite => 0.0,
    };
    proj * (phi_delta_prime_unchecked(r, delta) / r + layer)
}

/// Potential at the boundary node nearest to `x`; `x` must lie within one
/// node spacing of a node.
pub fn potential_on_boundary(x: [f64; 2], shape: &SampledShape, params: &KernelParams) -> Result<f64> {
    let mut best = (f64::INFINITY, 0, 0);
    for (ci, comp) in shape.components.iter().enumerate() {
        for (i, p) in comp.curve.points.iter().enumerate() {
            let d = dist(*p, x);
            if d < best.0 {
                best = (d, ci, i);
            }
        }
    }
    let (d, ci, i) = best;
    if shape.components.is_empty() || d > shape.components[ci].curve.ds {
        return Err(Error::Precondition(format!("point {x:?} is not on a sampled boundary")));
    }
    let v = boundary_potential(shape, params)?;
    Ok(v[ci][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_disk, make_ellipse, Component, Placement, ShapeConfig};
    use crate::quad::adaptive;

    fn params(lambda: f64, delta: f64, ell: LayerSeparation) -> KernelParams {
        KernelParams::new(lambda, delta, ell).unwrap()
    }

    /// `∫_{B₁} K(|x − y|) dy` for `x` on the unit circle, `l = ∞`.
    fn disk_oracle(delta: f64) -> f64 {
        let phi0 = (0.5 * delta).acos();
        2.0 * (phi0 / delta - 0.5 * (1.0 / phi0.cos() + phi0.tan()).ln())
    }

    #[test]
    fn disk_matches_volume_integral() {
        let shape = ShapeConfig::single(make_disk(1.0).unwrap()).unwrap().sample(256).unwrap();
        for delta in [0.2, 0.01, 1e-4] {
            let p = params(1.0, delta, LayerSeparation::Infinite);
            let v = boundary_potential(&shape, &p).unwrap();
            let want = p.nonlocal_prefactor() * disk_oracle(delta);
            for vi in &v[0] {
                assert!((vi - want).abs() < 1e-9 * want, "{delta}: {vi} {want}");
            }
        }
    }

    #[test]
    fn layered_disk_matches_volume_integral() {
        // ∫_{B₁} K_{δ,l}(|x−y|) dy for x = (1, 0) in polar coordinates about x
        let (delta, l) = (0.05, 0.7);
        let p = params(1.0, delta, LayerSeparation::Finite(l));
        let k = |r: f64| crate::kernels::kernel_k(r, &p).unwrap();
        let layer = |r: f64| crate::kernels::layer_kernel(r, p.ell());
        let want = 2.0
            * adaptive(0.5 * PI, PI, 1e-12, |phi| {
                let rho = -2.0 * phi.cos();
                adaptive(0.0, delta, 1e-13, |r| layer(r) * r) + adaptive(delta, rho, 1e-13, |r| k(r) * r)
            });
        let shape = ShapeConfig::single(make_disk(1.0).unwrap()).unwrap().sample(256).unwrap();
        let v = boundary_potential(&shape, &p).unwrap();
        let got = v[0][0] / p.nonlocal_prefactor();
        assert!((got - want).abs() < 1e-8 * want, "{got} {want}");
    }

    #[test]
    fn constant_on_disk_and_vanishes_with_lambda() {
        let shape = ShapeConfig::single(make_disk(1.0).unwrap()).unwrap().sample(128).unwrap();
        let v = boundary_potential(&shape, &params(1.0, 0.01, LayerSeparation::Finite(1.0))).unwrap();
        let mean = v[0].iter().sum::<f64>() / v[0].len() as f64;
        assert!(v[0].iter().all(|x| (x - mean).abs() < 1e-6 * mean.abs()));
        let z = boundary_potential(&shape, &params(0.0, 0.01, LayerSeparation::Infinite)).unwrap();
        assert!(z[0].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn far_component_does_not_interact() {
        let d = make_disk(1.0).unwrap();
        let e = make_ellipse(1.2, 0.8).unwrap();
        let one = ShapeConfig::new(vec![Component { curve: d.clone(), placement: Placement::Far }]).unwrap();
        let two = ShapeConfig::new(vec![
            Component { curve: d, placement: Placement::Far },
            Component { curve: e, placement: Placement::Far },
        ])
        .unwrap();
        let p = params(0.8, 0.01, LayerSeparation::Infinite);
        let v1 = boundary_potential(&one.sample(128).unwrap(), &p).unwrap();
        let v2 = boundary_potential(&two.sample(128).unwrap(), &p).unwrap();
        assert_eq!(v1[0], v2[0]);
    }

    #[test]
    fn ellipse_potential_matches_volume_quadrature() {
        // direct polar quadrature about a boundary point of the ellipse
        let (a, b, delta) = (1.5, 1.0, 0.05);
        let p = params(1.0, delta, LayerSeparation::Infinite);
        let shape = ShapeConfig::single(make_ellipse(a, b).unwrap()).unwrap().sample(512).unwrap();
        let v = boundary_potential(&shape, &p).unwrap();
        let c = &shape.components[0].curve;
        let i = 37;
        let x = c.points[i];
        // distance from x to the ellipse boundary along direction θ
        let reach = |th: f64| {
            let (dx, dy) = (th.cos(), th.sin());
            // solve ((x+ρdx)/a)² + ((y+ρdy)/b)² = 1 for ρ > 0
            let qa = (dx / a).powi(2) + (dy / b).powi(2);
            let qb = 2.0 * (x[0] * dx / (a * a) + x[1] * dy / (b * b));
            let qc = (x[0] / a).powi(2) + (x[1] / b).powi(2) - 1.0;
            let disc = (qb * qb - 4.0 * qa * qc).max(0.0);
            ((-qb + disc.sqrt()) / (2.0 * qa)).max(0.0)
        };
        let nu = c.normals[i];
        let base = (-nu[1]).atan2(-nu[0]);
        let integrand = |th: f64| {
            let rho = reach(th);
            if rho <= delta {
                0.0
            } else {
                1.0 / delta - 1.0 / rho
            }
        };
        let want = adaptive(base - 0.5 * PI, base + 0.5 * PI, 1e-11, integrand);
        let got = v[0][i] / p.nonlocal_prefactor();
        assert!((got - want).abs() < 1e-6 * want, "{got} {want}");
    }
}
