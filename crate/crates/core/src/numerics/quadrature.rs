use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{invalid, Result};

/// Gauss–Legendre nodes and weights on `[a, b]`.
///
/// Exact for polynomials of degree `2n - 1`. Nodes are returned in
/// increasing order.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(invalid("n", "need at least one node"));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("interval", "need finite a < b"));
    }
    let (x, w) = reference_rule(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok((
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| half * v).collect(),
    ))
}

/// Gauss–Legendre rule on `[-1, 1]`, nodes increasing.
pub fn reference_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Composite Gauss rule with `q` points on each panel `[e[k], e[k+1]]`.
pub fn composite_gauss(edges: &[f64], q: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = reference_rule(q);
    let mut nodes = Vec::with_capacity(edges.len().saturating_sub(1) * q);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in edges.windows(2) {
        let half = 0.5 * (pair[1] - pair[0]);
        let mid = 0.5 * (pair[1] + pair[0]);
        for k in 0..q {
            nodes.push(mid + half * x[k]);
            weights.push(half * w[k]);
        }
    }
    (nodes, weights)
}

/// Integrate `f` over `[a, b]` with `panels` equal panels of `q` Gauss points.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, q: usize) -> f64 {
    let (x, w) = reference_rule(q);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        for k in 0..q {
            s += 0.5 * h * w[k] * f(lo + 0.5 * h * (x[k] + 1.0));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_is_midpoint() {
        let (x, w) = gauss_legendre(1, -1.0, 1.0).unwrap();
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre(2, -1.0, 1.0).unwrap();
        let s = 1.0 / 3.0f64.sqrt();
        assert!((x[0] + s).abs() < 1e-15 && (x[1] - s).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_exact_with_two_points() {
        let (x, w) = gauss_legendre(2, 0.0, 1.0).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x * x).sum();
        assert!((s - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre(3, 1.0, 1.0).is_err());
        assert!(gauss_legendre(3, 2.0, 1.0).is_err());
    }

    #[test]
    fn large_rule_weights_sum() {
        for n in [7usize, 40, 128] {
            let (x, w) = reference_rule(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
