//! One-dimensional quadrature rules.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n ≥ 1` points, nodes found by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f` with this rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + r * x);
        }
        acc * r
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection on a 15-point Gauss–Legendre rule.
///
/// Subintervals are accepted when the one-panel and two-panel estimates agree
/// to `tol` (absolute, scaled by interval share). Integrable endpoint
/// singularities are handled since nodes never touch the endpoints.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> f64 {
    let rule = GaussLegendre::new(15);
    let whole = rule.integrate(a, b, &mut f);
    adaptive_step(&rule, &mut f, a, b, whole, tol, 0)
}

fn adaptive_step<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f);
    let right = rule.integrate(m, b, &mut *f);
    let split = left + right;
    // below the rounding floor further bisection only amplifies noise
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if (split - whole).abs() <= tol.max(floor) || depth >= 60 || m <= a || m >= b {
        return split;
    }
    adaptive_step(rule, f, a, m, left, 0.5 * tol, depth + 1)
        + adaptive_step(rule, f, m, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive integral over `[a, ∞)` via the substitution `x = a + u/(1 − u)`.
pub fn adaptive_to_infinity<F: FnMut(f64) -> f64>(a: f64, tol: f64, mut f: F) -> f64 {
    adaptive(0.0, 1.0, tol, |u| {
        let v = 1.0 - u;
        f(a + u / v) / (v * v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33, 64] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(6);
        let v = g.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_handles_log_endpoint() {
        let v = adaptive(0.0, 1.0, 1e-13, |x| x.ln());
        assert!((v + 1.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite_tail() {
        let v = adaptive_to_infinity(2.0, 1e-13, |x| 1.0 / (x * x));
        assert!((v - 0.5).abs() < 1e-11);
    }
}
