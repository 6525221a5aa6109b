use num_traits::Float;

use crate::error::{Error, Result};

/// Absolute residual the root finder guarantees.
pub const ROOT_TOL: f64 = 1e-12;

/// Bisection root of an increasing `f` with `f(lo) < 0 < f(hi)`.
///
/// Returns `x` with `|f(x)| ≤ 1e-12`, or the bracket midpoint once the
/// bracket collapses to adjacent floats (whichever comes first).
pub fn find_root_increasing<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::NotBracketed { f_lo, f_hi });
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= ROOT_TOL {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximize a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol * (1.0 + c.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = find_root_increasing(|x| x - 1.0, 0.0, 3.0).unwrap();
        assert!((r - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sqrt_two() {
        let r = find_root_increasing(|x| x * x - 2.0, 1.0, 2.0).unwrap();
        assert!((r * r - 2.0).abs() <= 1e-12);
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn lambda_star_instance() {
        let f = |l: f64| 6.0 * l + 2.0f64.sqrt() * l.powf(1.5) - 1.0;
        let r = find_root_increasing(f, 0.0, 1.0).unwrap();
        assert!((r - 0.1525).abs() < 5e-4);
        assert!(f(r).abs() <= 1e-12);
    }

    #[test]
    fn bracket_violation() {
        assert!(matches!(
            find_root_increasing(|x| x + 1.0, 0.0, 1.0),
            Err(Error::NotBracketed { .. })
        ));
    }

    #[test]
    fn golden_section_peak() {
        let (x, v) = golden_max(|r| r * r * (-r * r).exp(), 0.0, 3.0, 1e-12);
        assert!((x - 1.0).abs() < 1e-6);
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }
}
