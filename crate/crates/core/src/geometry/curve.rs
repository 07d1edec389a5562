use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Closed curve `t ↦ (x(t), y(t))`, `t ∈ [0, 2π)`, given by finite Fourier sums
///
/// ```text
/// x(t) = Σ_k cos_x[k]·cos(kt) + sin_x[k]·sin(kt)
/// ```
///
/// and likewise for `y`. All four lists have equal length `K + 1`; the
/// `sin_*[0]` entries are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanCurve {
    pub cos_x: Vec<f64>,
    pub sin_x: Vec<f64>,
    pub cos_y: Vec<f64>,
    pub sin_y: Vec<f64>,
}

/// Position and the first two parameter derivatives at one `t`.
#[derive(Debug, Clone, Copy)]
pub struct CurveJet {
    pub pos: [f64; 2],
    pub d1: [f64; 2],
    pub d2: [f64; 2],
}

impl JordanCurve {
    /// Pads the lists to a common length and rejects non-finite entries.
    pub fn from_coefficients(
        cos_x: Vec<f64>,
        sin_x: Vec<f64>,
        cos_y: Vec<f64>,
        sin_y: Vec<f64>,
    ) -> Result<Self> {
        let len = cos_x.len().max(sin_x.len()).max(cos_y.len()).max(sin_y.len()).max(1);
        let pad = |mut v: Vec<f64>| {
            v.resize(len, 0.0);
            v
        };
        let c = Self {
            cos_x: pad(cos_x),
            sin_x: pad(sin_x),
            cos_y: pad(cos_y),
            sin_y: pad(sin_y),
        };
        let all = c.cos_x.iter().chain(&c.sin_x).chain(&c.cos_y).chain(&c.sin_y);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite Fourier coefficient".into()));
        }
        Ok(c)
    }

    /// Highest retained mode `K`.
    pub fn modes(&self) -> usize {
        self.cos_x.len().saturating_sub(1)
    }

    /// Evaluates position, `γ'` and `γ''` at parameter `t`.
    pub fn jet(&self, t: f64) -> CurveJet {
        let (s1, c1) = t.sin_cos();
        let mut pos = [self.cos_x[0], self.cos_y[0]];
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        let (mut ck, mut sk) = (1.0, 0.0);
        for k in 1..self.cos_x.len() {
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
            if k % 64 == 0 {
                let (s, c) = (k as f64 * t).sin_cos();
                sk = s;
                ck = c;
            }
            let kf = k as f64;
            let (ax, bx, ay, by) = (self.cos_x[k], self.sin_x[k], self.cos_y[k], self.sin_y[k]);
            pos[0] += ax * ck + bx * sk;
            pos[1] += ay * ck + by * sk;
            d1[0] += kf * (bx * ck - ax * sk);
            d1[1] += kf * (by * ck - ay * sk);
            d2[0] -= kf * kf * (ax * ck + bx * sk);
            d2[1] -= kf * kf * (ay * ck + by * sk);
        }
        CurveJet { pos, d1, d2 }
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        self.jet(t).pos
    }

    /// Signed area `π Σ k (a_k d_k − b_k c_k)` from the coefficients.
    pub fn signed_area(&self) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.cos_x.len() {
            acc += k as f64 * (self.cos_x[k] * self.sin_y[k] - self.sin_x[k] * self.cos_y[k]);
        }
        PI * acc
    }

    /// Enclosed area; a non-positive signed area is an orientation violation.
    pub fn enclosed_area(&self) -> Result<f64> {
        let a = self.signed_area();
        if a > 0.0 {
            Ok(a)
        } else {
            Err(Error::Orientation(a))
        }
    }

    /// Image under `z ↦ α z` (dilation about the origin).
    pub fn scaled(&self, alpha: f64) -> Self {
        let s = |v: &[f64]| v.iter().map(|c| c * alpha).collect();
        Self {
            cos_x: s(&self.cos_x),
            sin_x: s(&self.sin_x),
            cos_y: s(&self.cos_y),
            sin_y: s(&self.sin_y),
        }
    }

    /// Dilation by `α` about the mean point `(cos_x[0], cos_y[0])`.
    pub fn dilated_about_center(&self, alpha: f64) -> Self {
        let mut c = self.scaled(alpha);
        c.cos_x[0] = self.cos_x[0];
        c.cos_y[0] = self.cos_y[0];
        c
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mut c = self.clone();
        c.cos_x[0] += dx;
        c.cos_y[0] += dy;
        c
    }

    pub fn center(&self) -> [f64; 2] {
        [self.cos_x[0], self.cos_y[0]]
    }

    /// Fits a curve through points equally spaced in parameter.
    ///
    /// Mode `k` is kept when `k ≤ max_mode` and multiplied by `filter(k)`.
    pub fn from_samples<F: Fn(usize) -> f64>(
        points: &[[f64; 2]],
        max_mode: usize,
        filter: F,
    ) -> Result<Self> {
        let n = points.len();
        if n < 4 {
            return Err(Error::DegenerateCurve(format!("{n} sample points")));
        }
        let mut buf: Vec<Complex64> = points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let inv = 1.0 / n as f64;
        let kmax = max_mode.min((n - 1) / 2);
        let z = |k: isize| buf[k.rem_euclid(n as isize) as usize] * inv;
        let mut cos_x = vec![0.0; kmax + 1];
        let mut sin_x = vec![0.0; kmax + 1];
        let mut cos_y = vec![0.0; kmax + 1];
        let mut sin_y = vec![0.0; kmax + 1];
        let z0 = z(0);
        cos_x[0] = z0.re;
        cos_y[0] = z0.im;
        for k in 1..=kmax {
            let f = filter(k);
            let (zp, zm) = (z(k as isize), z(-(k as isize)));
            let sum = zp + zm;
            let diff = zp - zm;
            cos_x[k] = f * sum.re;
            sin_x[k] = -f * diff.im;
            cos_y[k] = f * sum.im;
            sin_y[k] = f * diff.re;
        }
        Self::from_coefficients(cos_x, sin_x, cos_y, sin_y)
    }

    /// Drops trailing modes whose coefficients are all below `tol`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        while self.cos_x.len() > 2 {
            let k = self.cos_x.len() - 1;
            let m = self.cos_x[k]
                .abs()
                .max(self.sin_x[k].abs())
                .max(self.cos_y[k].abs())
                .max(self.sin_y[k].abs());
            if m >= tol {
                break;
            }
            self.cos_x.pop();
            self.sin_x.pop();
            self.cos_y.pop();
            self.sin_y.pop();
        }
        self
    }
}
