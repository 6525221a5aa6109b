//! Extrapolation of grid-refinement sequences.

use num_traits::Float;

use super::roots::find_root_increasing;
use crate::error::{invalid, Result};

/// Richardson extrapolation for errors `~ C h^p` from two levels with ratio 2.
pub fn richardson(coarse: f64, fine: f64, order: f64) -> f64 {
    let f = 2.0f64.powf(order);
    (f * fine - coarse) / (f - 1.0)
}

/// Observed order from three levels with ratio 2.
pub fn observed_order(e1: f64, e2: f64) -> f64 {
    (e1.abs() / e2.abs()).log2()
}

/// Extrapolate values on grids that cover a logarithmic range `γ ln n`.
///
/// Fits `v(n) = v∞ − C/(γ ln n + c)²` exactly through three points and
/// returns `v∞`. This is the convergence law of a scale-invariant kernel
/// truncated to a finite log-range.
pub fn log_range_extrapolate(ns: [f64; 3], vals: [f64; 3], gamma: f64) -> Result<f64> {
    let l: [f64; 3] = [gamma * ns[0].ln(), gamma * ns[1].ln(), gamma * ns[2].ln()];
    let d1 = vals[1] - vals[0];
    let d2 = vals[2] - vals[1];
    if !(d1 > 0.0 && d2 > 0.0 && d2 < d1) {
        return Err(invalid(
            "vals",
            "sequence must increase with shrinking increments for the log-range model",
        ));
    }
    let x = |c: f64, k: usize| 1.0 / ((l[k] + c) * (l[k] + c));
    // ratio (x0 - x1)/(x1 - x2) must equal d1/d2; solve for c.
    let target = d1 / d2;
    let g = |c: f64| {
        let r = (x(c, 0) - x(c, 1)) / (x(c, 1) - x(c, 2));
        target - r
    };
    // r(c) decreases towards the algebraic ratio as c grows; search c > -l0.
    let lo = -l[0] + 1e-6;
    let mut hi = 1.0;
    while g(hi) < 0.0 && hi < 1e8 {
        hi *= 2.0;
    }
    let c = find_root_increasing(g, lo, hi)?;
    let cc = d1 / (x(c, 0) - x(c, 1));
    Ok(vals[2] + cc * x(c, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_quadratic_error() {
        let f = |h: f64| 1.0 + 3.0 * h * h;
        assert!((richardson(f(0.1), f(0.05), 2.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn log_model_recovered() {
        let (v, cc, c, gamma) = (0.5, 0.8, 7.0, 2.0);
        let ns = [200.0, 400.0, 800.0];
        let f = |n: f64| v - cc / ((gamma * n.ln() + c) * (gamma * n.ln() + c));
        let vals = [f(ns[0]), f(ns[1]), f(ns[2])];
        let e = log_range_extrapolate(ns, vals, gamma).unwrap();
        assert!((e - v).abs() < 1e-9, "{e}");
    }
}
