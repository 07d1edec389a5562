use super::config::ShapeConfig;
use super::sampled::sample_arclength;
use crate::error::{Error, Result};

/// Boolean occupancy grid. Cell `(i, j)` covers
/// `[x0 + ih, x0 + (i+1)h) × [y0 + jh, y0 + (j+1)h)`; the mask is row-major in `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterSet {
    pub h: f64,
    pub origin: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<bool>,
}

/// Cells of padding around the rasterized shape.
const PAD: usize = 2;

impl RasterSet {
    /// Builds a grid whose cell `(i, j)` is occupied iff `inside(center)`.
    pub fn from_fn<F: Fn([f64; 2]) -> bool>(
        h: f64,
        origin: [f64; 2],
        nx: usize,
        ny: usize,
        inside: F,
    ) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be > 0, got {h}")));
        }
        let mut mask = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let c = [origin[0] + (i as f64 + 0.5) * h, origin[1] + (j as f64 + 0.5) * h];
                mask[j * nx + i] = inside(c);
            }
        }
        Ok(Self { h, origin, nx, ny, mask })
    }

    /// Closed disk of radius `r` about the origin on a window of half-width `r + 2h`.
    pub fn disk(r: f64, h: f64) -> Result<Self> {
        let cells = ((r / h).ceil() as usize + PAD) * 2;
        let half = cells as f64 * h / 2.0;
        Self::from_fn(h, [-half, -half], cells, cells, |c| c[0] * c[0] + c[1] * c[1] <= r * r)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// `h² ×` occupied cells.
    pub fn mass(&self) -> f64 {
        self.h * self.h * self.count() as f64
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.nx + i]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }
}

/// Rasterizes a shape: a cell is occupied iff its centre lies inside some component.
///
/// Components are resolved as polylines with spacing at most `h/4`.
pub fn rasterize(config: &ShapeConfig, h: f64) -> Result<RasterSet> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("grid spacing must be > 0, got {h}")));
    }
    if config.components.iter().any(|c| matches!(c.placement, super::Placement::Far)) {
        return Err(Error::Unsupported(
            "far-separated components have no common grid".into(),
        ));
    }
    if config.is_empty() {
        return Ok(RasterSet { h, origin: [0.0, 0.0], nx: 0, ny: 0, mask: Vec::new() });
    }
    let mut polys = Vec::new();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for (curve, _) in config.placed_curves() {
        let probe = sample_arclength(&curve, 64)?;
        let n = ((4.0 * probe.perimeter / h).ceil() as usize).max(64);
        let s = sample_arclength(&curve, n)?;
        for p in &s.points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        polys.push(s.points);
    }
    let i0 = (lo[0] / h).floor() as i64 - PAD as i64;
    let j0 = (lo[1] / h).floor() as i64 - PAD as i64;
    let nx = ((hi[0] / h).ceil() as i64 + PAD as i64 - i0) as usize;
    let ny = ((hi[1] / h).ceil() as i64 + PAD as i64 - j0) as usize;
    let origin = [i0 as f64 * h, j0 as f64 * h];
    let mut mask = vec![false; nx * ny];
    let mut xs = Vec::new();
    for j in 0..ny {
        let y = origin[1] + (j as f64 + 0.5) * h;
        xs.clear();
        for poly in &polys {
            let n = poly.len();
            for k in 0..n {
                let a = poly[k];
                let b = poly[(k + 1) % n];
                if (a[1] > y) != (b[1] > y) {
                    xs.push(a[0] + (y - a[1]) / (b[1] - a[1]) * (b[0] - a[0]));
                }
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite crossing"));
        for pair in xs.chunks_exact(2) {
            let (xa, xb) = (pair[0], pair[1]);
            // centres with xa < x < xb
            let first = ((xa - origin[0]) / h - 0.5).floor() as i64 + 1;
            let last = ((xb - origin[0]) / h - 0.5).ceil() as i64 - 1;
            for i in first.max(0)..=last.min(nx as i64 - 1) {
                mask[j * nx + i as usize] = true;
            }
        }
    }
    Ok(RasterSet { h, origin, nx, ny, mask })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{make_disk, make_stripe};
    use crate::geometry::{Component, Placement};
    use std::f64::consts::PI;

    #[test]
    fn disk_mass_bound() {
        let h = 0.02;
        let r = rasterize(&ShapeConfig::single(make_disk(1.0).unwrap()).unwrap(), h).unwrap();
        assert!((r.mass() - PI).abs() <= 0.15 * h * 2.0 * PI, "{}", r.mass());
    }

    #[test]
    fn empty_config() {
        let r = rasterize(&ShapeConfig::empty(), 0.1).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.mass(), 0.0);
    }

    #[test]
    fn stripe_mass() {
        let h = 0.05;
        let c = ShapeConfig::single(make_stripe(1.0, 4.0, 0.0).unwrap()).unwrap();
        let r = rasterize(&c, h).unwrap();
        assert!((r.mass() - 4.0).abs() <= 0.05 * 10.0, "{}", r.mass());
    }

    #[test]
    fn far_components_rejected() {
        let c = ShapeConfig::far_copies(&make_disk(1.0).unwrap(), 2).unwrap();
        assert!(rasterize(&c, 0.1).is_err());
    }

    #[test]
    fn scanline_matches_point_test() {
        let d = make_disk(1.0).unwrap();
        let c = ShapeConfig::new(vec![
            Component { curve: d.clone(), placement: Placement::At([0.0, 0.0]) },
            Component { curve: d.scaled(0.5), placement: Placement::At([2.0, 0.3]) },
        ])
        .unwrap();
        let r = rasterize(&c, 0.05).unwrap();
        for j in 0..r.ny {
            for i in 0..r.nx {
                let p = r.cell_center(i, j);
                let q = [p[0] - 2.0, p[1] - 0.3];
                let inside = p[0].hypot(p[1]) < 1.0 || q[0].hypot(q[1]) < 0.5;
                let near = (p[0].hypot(p[1]) - 1.0).abs() < 1e-3 || (q[0].hypot(q[1]) - 0.5).abs() < 1e-3;
                if !near {
                    assert_eq!(r.get(i, j), inside, "cell {i},{j}");
                }
            }
        }
    }

    #[test]
    fn disk_helper() {
        let r = RasterSet::disk(1.0, 0.01).unwrap();
        assert!((r.mass() - PI).abs() < 0.01);
    }
}
