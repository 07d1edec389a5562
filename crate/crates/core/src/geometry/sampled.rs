use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use super::curve::JordanCurve;
use crate::error::{Error, Result};

/// A curve sampled at `n` nodes of equal arclength spacing `ds = P/n`.
///
/// `normals` point outward for a counterclockwise curve: `ν = (τ_y, −τ_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub points: Vec<[f64; 2]>,
    pub tangents: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub curvature: Vec<f64>,
    /// Fourier parameter `t` of each node.
    pub params: Vec<f64>,
    pub perimeter: f64,
    pub ds: f64,
}

/// Arclength `s(t) = s̄·t + Σ_k (A_k sin kt − B_k(cos kt − 1))/k` built from
/// the Fourier series of the speed.
struct ArclengthMap {
    mean: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ArclengthMap {
    fn new(curve: &JordanCurve) -> Self {
        let k = curve.modes().max(1);
        let m = (8 * (k + 1)).max(256).next_power_of_two();
        let mut buf: Vec<Complex64> = (0..m)
            .map(|j| {
                let d = curve.jet(2.0 * PI * j as f64 / m as f64).d1;
                Complex64::new(d[0].hypot(d[1]), 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let inv = 1.0 / m as f64;
        let mean = buf[0].re * inv;
        let floor = 1e-17 * mean.abs();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut last = 0;
        for kk in 1..m / 2 {
            let c = buf[kk] * inv;
            a.push(2.0 * c.re);
            b.push(-2.0 * c.im);
            if c.norm() > floor {
                last = kk;
            }
        }
        a.truncate(last);
        b.truncate(last);
        Self { mean, a, b }
    }

    fn perimeter(&self) -> f64 {
        2.0 * PI * self.mean
    }

    /// `(s(t), s'(t))`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let (s1, c1) = t.sin_cos();
        let (mut ck, mut sk) = (1.0, 0.0);
        let mut s = self.mean * t;
        let mut ds = self.mean;
        for i in 0..self.a.len() {
            let k = i + 1;
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
            if k % 64 == 0 {
                let (s, c) = (k as f64 * t).sin_cos();
                sk = s;
                ck = c;
            }
            let kf = k as f64;
            s += (self.a[i] * sk - self.b[i] * (ck - 1.0)) / kf;
            ds += self.a[i] * ck + self.b[i] * sk;
        }
        (s, ds)
    }
}

/// Samples `curve` at `n ≥ 16` nodes equally spaced in arclength.
///
/// Tangents, normals and curvature come from exact Fourier derivatives at the
/// reparametrized nodes.
pub fn sample_arclength(curve: &JordanCurve, n: usize) -> Result<SampledCurve> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("node count must be >= 16, got {n}")));
    }
    let map = ArclengthMap::new(curve);
    let perimeter = map.perimeter();
    if !(perimeter > 1e-12) {
        return Err(Error::DegenerateCurve(format!("perimeter {perimeter:.3e}")));
    }
    let ds = perimeter / n as f64;
    let mut params = Vec::with_capacity(n);
    let mut t = 0.0f64;
    let mut prev = 0.0f64;
    for i in 0..n {
        let target = i as f64 * ds;
        let (mut lo, mut hi) = (prev, 2.0 * PI);
        for _ in 0..100 {
            let (s, sp) = map.eval(t);
            let f = s - target;
            if f.abs() <= 1e-14 * perimeter {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / sp;
            if !(next > lo && next < hi) || sp <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            t = next;
        }
        params.push(t);
        prev = t;
        let (_, sp) = map.eval(t);
        t += ds / sp.max(1e-300);
        t = t.min(2.0 * PI);
    }
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for &t in &params {
        let j = curve.jet(t);
        let speed = j.d1[0].hypot(j.d1[1]);
        if !(speed > 0.0) {
            return Err(Error::DegenerateCurve(format!("zero speed at t = {t}")));
        }
        let tau = [j.d1[0] / speed, j.d1[1] / speed];
        points.push(j.pos);
        tangents.push(tau);
        normals.push([tau[1], -tau[0]]);
        curvature.push((j.d1[0] * j.d2[1] - j.d1[1] * j.d2[0]) / speed.powi(3));
    }
    Ok(SampledCurve {
        points,
        tangents,
        normals,
        curvature,
        params,
        perimeter,
        ds,
    })
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Shoelace area of the polyline through the nodes.
    pub fn polygon_area(&self) -> f64 {
        let n = self.points.len();
        let mut acc = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            acc += p[0] * q[1] - p[1] * q[0];
        }
        0.5 * acc
    }

    /// `Σ κ ds`.
    pub fn total_curvature(&self) -> f64 {
        self.curvature.iter().sum::<f64>() * self.ds
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.curvature.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mut c = self.clone();
        for p in &mut c.points {
            p[0] += dx;
            p[1] += dy;
        }
        c
    }

    /// Checks the closed polyline for non-adjacent segment intersections.
    pub fn check_simple(&self) -> Result<()> {
        let segs = segments(&self.points);
        let n = segs.len();
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_intersect(segs[i], segs[j]) {
                    return Err(Error::SelfIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    /// True if any segment of `self` meets any segment of `other`.
    pub fn intersects(&self, other: &SampledCurve) -> bool {
        let a = segments(&self.points);
        let b = segments(&other.points);
        a.iter().any(|s| b.iter().any(|t| segments_intersect(*s, *t)))
    }

    /// Even–odd point-in-polygon test.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.points.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

type Segment = ([f64; 2], [f64; 2]);

fn segments(points: &[[f64; 2]]) -> Vec<Segment> {
    let n = points.len();
    (0..n).map(|i| (points[i], points[(i + 1) % n])).collect()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(s: Segment, t: Segment) -> bool {
    let (p1, p2) = s;
    let (q1, q2) = t;
    if p1[0].max(p2[0]) < q1[0].min(q2[0])
        || q1[0].max(q2[0]) < p1[0].min(p2[0])
        || p1[1].max(p2[1]) < q1[1].min(q2[1])
        || q1[1].max(q2[1]) < p1[1].min(p2[1])
    {
        return false;
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse(a: f64, b: f64) -> JordanCurve {
        JordanCurve::from_coefficients(vec![0.0, a], vec![], vec![], vec![0.0, b]).unwrap()
    }

    #[test]
    fn unit_circle() {
        let c = sample_arclength(&ellipse(1.0, 1.0), 256).unwrap();
        assert!((c.perimeter - 2.0 * PI).abs() < 1e-10);
        for k in &c.curvature {
            assert!((k - 1.0).abs() < 1e-8);
        }
        for (t, nu) in c.tangents.iter().zip(&c.normals) {
            assert!(((t[0] * t[0] + t[1] * t[1]).sqrt() - 1.0).abs() < 1e-8);
            assert!((t[0] * nu[0] + t[1] * nu[1]).abs() < 1e-14);
        }
        // outward normal on the circle equals the position
        for (p, nu) in c.points.iter().zip(&c.normals) {
            assert!((p[0] - nu[0]).abs() < 1e-12 && (p[1] - nu[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_curvature_range_and_spacing() {
        let c = sample_arclength(&ellipse(2.0, 1.0), 512).unwrap();
        let kmin = c.curvature.iter().cloned().fold(f64::INFINITY, f64::min);
        let kmax = c.curvature.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((kmin - 0.25).abs() < 1e-10, "{kmin}");
        assert!((kmax - 2.0).abs() < 1e-10, "{kmax}");
        // analytic curvature at each node
        for (t, k) in c.params.iter().zip(&c.curvature) {
            let exact = 2.0 / (4.0 * t.sin().powi(2) + t.cos().powi(2)).powf(1.5);
            assert!((k - exact).abs() < 1e-10);
        }
        // chord lengths are nearly uniform and sum below the perimeter
        let n = c.len();
        let chords: f64 = (0..n)
            .map(|i| {
                let p = c.points[i];
                let q = c.points[(i + 1) % n];
                (q[0] - p[0]).hypot(q[1] - p[1])
            })
            .sum();
        assert!(chords < c.perimeter && chords > c.perimeter * (1.0 - 1e-4));
        assert!((c.total_curvature() - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn ellipse_perimeter_matches_elliptic_integral() {
        // P = 4a E(1 − b²/a²)
        let c = sample_arclength(&ellipse(2.0, 1.0), 64).unwrap();
        let exact = 8.0 * crate::kernels::elliptic_e(0.75).unwrap();
        assert!((c.perimeter - exact).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_n_and_degenerate() {
        assert!(sample_arclength(&ellipse(1.0, 1.0), 8).is_err());
        let z = JordanCurve::from_coefficients(vec![1.0], vec![], vec![], vec![]).unwrap();
        assert!(sample_arclength(&z, 32).is_err());
    }

    #[test]
    fn detects_self_intersection() {
        // limaçon-like figure-eight: x = sin 2t, y = sin t
        let c = JordanCurve::from_coefficients(vec![0.0], vec![0.0, 0.0, 1.0], vec![0.0], vec![0.0, 1.0])
            .unwrap();
        let s = sample_arclength(&c, 64).unwrap();
        assert!(s.check_simple().is_err());
        let e = sample_arclength(&ellipse(2.0, 1.0), 64).unwrap();
        assert!(e.check_simple().is_ok());
    }

    #[test]
    fn contains_points() {
        let e = sample_arclength(&ellipse(2.0, 1.0), 128).unwrap();
        assert!(e.contains([0.0, 0.0]));
        assert!(e.contains([1.9, 0.0]));
        assert!(!e.contains([0.0, 1.1]));
    }
}
