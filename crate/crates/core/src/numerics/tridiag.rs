//! Real symmetric tridiagonal eigenproblems.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() == d.len() - 1`), ascending.
///
/// Implicit QL with Wilkinson shifts.
pub fn symmetric_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if e.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: e.len(),
        });
    }
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(core::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    Ok(d)
}

/// Unit eigenvector for an (approximate) eigenvalue `mu` by inverse iteration.
pub fn symmetric_eigenvector(d: &[f64], e: &[f64], mu: f64) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = d
        .iter()
        .map(|v| v.abs())
        .chain(e.iter().map(|v| 2.0 * v.abs()))
        .fold(0.0, f64::max);
    let mut shift = mu + 1e-13 * scale.max(f64::MIN_POSITIVE);
    // Deterministic non-special start vector.
    let mut x: Vec<f64> = (0..n)
        .map(|k| 1.0 + 0.37 * ((k as f64 * 0.618_033_988_75).fract() - 0.5))
        .collect();
    for it in 0..4 {
        let sol = tridiag_solve(d, e, shift, &x);
        let nrm = sol.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nrm.is_finite()) || nrm == 0.0 {
            shift = mu + (1e-10 * (it + 1) as f64) * scale.max(f64::MIN_POSITIVE);
            continue;
        }
        x = sol.iter().map(|v| v / nrm).collect();
    }
    x
}

/// Solve `(T - shift I) x = b` with partial pivoting (general tridiagonal LU).
fn tridiag_solve(d: &[f64], e: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let n = d.len();
    let tiny = f64::EPSILON * f64::EPSILON;
    let mut diag: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let mut up: Vec<f64> = e.to_vec();
    let mut lo: Vec<f64> = e.to_vec();
    let mut up2 = vec![0.0; n.saturating_sub(2)];
    let mut rhs = b.to_vec();
    for i in 0..n - 1 {
        if diag[i].abs() >= lo[i].abs() {
            let piv = if diag[i] == 0.0 { tiny } else { diag[i] };
            diag[i] = piv;
            let f = lo[i] / piv;
            lo[i] = f;
            diag[i + 1] -= f * up[i];
            rhs[i + 1] -= f * rhs[i];
        } else {
            // swap rows i and i+1
            let f = diag[i] / lo[i];
            diag[i] = lo[i];
            lo[i] = f;
            let tmp = up[i];
            up[i] = diag[i + 1];
            diag[i + 1] = tmp - f * diag[i + 1];
            if i + 1 < n - 1 {
                up2[i] = up[i + 1];
                up[i + 1] = -f * up[i + 1];
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if diag[n - 1] == 0.0 {
        diag[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= up[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= up2[i] * x[i + 2];
        }
        x[i] = s / diag[i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = symmetric_eigenvalues(&d, &e).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-12, "{k}: {v} vs {exact}");
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let n = 40;
        let d: Vec<f64> = (0..n).map(|k| (k as f64 * 0.7).sin() * 3.0).collect();
        let e: Vec<f64> = (0..n - 1).map(|k| 1.0 + 0.1 * k as f64).collect();
        let ev = symmetric_eigenvalues(&d, &e).unwrap();
        for &mu in &ev {
            let v = symmetric_eigenvector(&d, &e, mu);
            let mut r2 = 0.0;
            for i in 0..n {
                let mut s = d[i] * v[i] - mu * v[i];
                if i > 0 {
                    s += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += e[i] * v[i + 1];
                }
                r2 += s * s;
            }
            assert!(r2.sqrt() < 1e-11, "residual {}", r2.sqrt());
        }
    }
}
