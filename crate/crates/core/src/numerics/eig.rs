//! Dense complex eigensolver: Householder reduction to Hessenberg form,
//! shifted QR iteration to Schur form, eigenvectors by back-substitution.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use super::lu::Lu;
use super::matrix::{vec_norm, DenseComplexMatrix};
use crate::error::{Error, Result};
use crate::C64;

/// Eigenvalue, unit eigenvector and residual `‖Mv − λv‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigPair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub residual: f64,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative residual bound every returned pair satisfies.
pub const EIG_TOL: f64 = 1e-10;

/// All eigenpairs of `m`.
///
/// Every pair satisfies `‖Mv − λv‖ ≤ 1e-10 ‖M‖_F ‖v‖`. Pairs that miss the
/// bound after back-substitution get two steps of inverse iteration.
pub fn eig_complex(m: &DenseComplexMatrix) -> Result<Vec<EigPair>> {
    let n = m.order();
    if !m.is_finite() {
        return Err(crate::error::invalid("M", "matrix has non-finite entries"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.as_slice().to_vec();
    let mut z = DenseComplexMatrix::identity(n).as_slice().to_vec();
    hessenberg(n, &mut h, &mut z);
    schur(n, &mut h, &mut z)?;
    let vals: Vec<C64> = (0..n).map(|i| h[i * n + i]).collect();
    let ys = triangular_eigenvectors(n, &h);
    let mnorm = m.frobenius_norm();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // v = Z y_k, y_k has support 0..=k
        let y = &ys[k];
        let mut v = vec![ZERO; n];
        for i in 0..n {
            let mut s = ZERO;
            for j in 0..=k {
                s += z[i * n + j] * y[j];
            }
            v[i] = s;
        }
        normalize(&mut v);
        let lambda = vals[k];
        let mut res = residual(m, lambda, &v);
        if res > EIG_TOL * mnorm.max(f64::MIN_POSITIVE) {
            if let Some((v2, r2)) = polish(m, lambda, &v, mnorm) {
                if r2 < res {
                    v = v2;
                    res = r2;
                }
            }
        }
        out.push(EigPair {
            value: lambda,
            vector: v,
            residual: res,
        });
    }
    Ok(out)
}

/// Eigenvalues only (cheaper: no back-substitution).
pub fn eigenvalues(m: &DenseComplexMatrix) -> Result<Vec<C64>> {
    let n = m.order();
    let mut h = m.as_slice().to_vec();
    let mut z = Vec::new();
    hessenberg_no_z(n, &mut h);
    schur_impl(n, &mut h, &mut z, false)?;
    Ok((0..n).map(|i| h[i * n + i]).collect())
}

fn normalize(v: &mut [C64]) {
    let nrm = vec_norm(v);
    if nrm > 0.0 {
        for x in v.iter_mut() {
            *x /= nrm;
        }
    }
}

pub(crate) fn residual(m: &DenseComplexMatrix, lambda: C64, v: &[C64]) -> f64 {
    let mut r = m.apply(v);
    for (ri, vi) in r.iter_mut().zip(v) {
        *ri -= lambda * vi;
    }
    vec_norm(&r)
}

fn polish(m: &DenseComplexMatrix, lambda: C64, v: &[C64], mnorm: f64) -> Option<(Vec<C64>, f64)> {
    let delta = C64::new(1e-12 * mnorm.max(1e-300), 1e-12 * mnorm.max(1e-300));
    let lu = Lu::factor(&m.shifted(lambda + delta)).ok()?;
    let mut x = v.to_vec();
    for _ in 0..2 {
        x = lu.solve(&x);
        normalize(&mut x);
    }
    let r = residual(m, lambda, &x);
    Some((x, r))
}

fn hessenberg(n: usize, a: &mut [C64], z: &mut [C64]) {
    hessenberg_impl(n, a, Some(z));
}

fn hessenberg_no_z(n: usize, a: &mut [C64]) {
    hessenberg_impl(n, a, None);
}

/// Householder reduction `A ← Qᴴ A Q`, `Z ← Z Q`.
fn hessenberg_impl(n: usize, a: &mut [C64], mut z: Option<&mut [C64]>) {
    if n < 3 {
        return;
    }
    let mut u = vec![ZERO; n];
    for k in 0..n - 2 {
        // Column k, rows k+1..n
        let alpha_norm: f64 = (k + 1..n)
            .map(|i| a[i * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        // u = x + phase*|x| e1
        for i in k + 1..n {
            u[i] = a[i * n + k];
        }
        u[k + 1] += phase * alpha_norm;
        let unorm2: f64 = (k + 1..n).map(|i| u[i].norm_sqr()).sum();
        if unorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / unorm2;
        // A ← (I − τ u uᴴ) A : rows k+1..n, all columns k..n
        for j in k..n {
            let mut s = ZERO;
            for i in k + 1..n {
                s += u[i].conj() * a[i * n + j];
            }
            s *= tau;
            for i in k + 1..n {
                a[i * n + j] -= u[i] * s;
            }
        }
        // A ← A (I − τ u uᴴ) : all rows, columns k+1..n
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let mut s = ZERO;
            for j in k + 1..n {
                s += row[j] * u[j];
            }
            s *= tau;
            for j in k + 1..n {
                row[j] -= s * u[j].conj();
            }
        }
        if let Some(z) = z.as_deref_mut() {
            for i in 0..n {
                let row = &mut z[i * n..(i + 1) * n];
                let mut s = ZERO;
                for j in k + 1..n {
                    s += row[j] * u[j];
                }
                s *= tau;
                for j in k + 1..n {
                    row[j] -= s * u[j].conj();
                }
            }
        }
        for i in k + 2..n {
            a[i * n + k] = ZERO;
        }
    }
}

fn schur(n: usize, h: &mut [C64], z: &mut [C64]) -> Result<()> {
    let mut zz = z.to_vec();
    schur_impl(n, h, &mut zz, true)?;
    z.copy_from_slice(&zz);
    Ok(())
}

/// Givens rotation `[c s; -conj(s) c]` (c real) with `G [a; b] = [r; 0]`.
#[inline]
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, (b / bn).conj());
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Shifted QR on an upper Hessenberg matrix until it is upper triangular.
fn schur_impl(n: usize, h: &mut [C64], z: &mut [C64], want_z: bool) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total_iter = 0usize;
    let max_total = 60 * n.max(10);
    let mut rots: Vec<(f64, C64)> = vec![(1.0, ZERO); n];
    while hi > 0 {
        // Find the active block [lo, hi].
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo * n + lo - 1].norm();
            let mut diag = h[(lo - 1) * n + lo - 1].norm() + h[lo * n + lo].norm();
            if diag == 0.0 {
                diag = norm1_block(n, h, 0, hi);
            }
            if sub <= f64::EPSILON * diag {
                h[lo * n + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter_since_deflation = 0;
            continue;
        }
        total_iter += 1;
        iter_since_deflation += 1;
        if total_iter > max_total {
            return Err(Error::NoConvergence { index: hi });
        }
        // Shift
        let shift = if iter_since_deflation % 11 == 10 {
            // exceptional shift
            let t = h[hi * n + hi - 1].norm()
                + if hi >= 2 {
                    h[(hi - 1) * n + hi - 2].norm()
                } else {
                    0.0
                };
            h[hi * n + hi] + C64::new(0.75 * t, -0.4375 * t)
        } else {
            wilkinson(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                h[hi * n + hi],
            )
        };
        // Explicit shifted QR step on the block via Givens rotations.
        for k in lo..=hi {
            h[k * n + k] -= shift;
        }
        for k in lo..hi {
            let (c, s) = givens(h[k * n + k], h[(k + 1) * n + k]);
            rots[k] = (c, s);
            // rows k, k+1 ; columns k..n
            for j in k..n {
                let a = h[k * n + j];
                let b = h[(k + 1) * n + j];
                h[k * n + j] = a * c + s * b;
                h[(k + 1) * n + j] = -s.conj() * a + b * c;
            }
        }
        for k in lo..hi {
            let (c, s) = rots[k];
            // columns k, k+1 ; rows 0..=min(k+2, hi)   (apply Gᴴ on the right)
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let a = h[i * n + k];
                let b = h[i * n + k + 1];
                h[i * n + k] = a * c + b * s.conj();
                h[i * n + k + 1] = -a * s + b * c;
            }
            if want_z {
                for i in 0..n {
                    let a = z[i * n + k];
                    let b = z[i * n + k + 1];
                    z[i * n + k] = a * c + b * s.conj();
                    z[i * n + k + 1] = -a * s + b * c;
                }
            }
        }
        for k in lo..=hi {
            h[k * n + k] += shift;
        }
    }
    Ok(())
}

fn norm1_block(n: usize, h: &[C64], lo: usize, hi: usize) -> f64 {
    let mut s: f64 = 0.0;
    for i in lo..=hi {
        for j in lo..=hi {
            s = s.max(h[i * n + j].norm());
        }
    }
    s
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let diff_half = (a - d) * 0.5;
    let disc = (diff_half * diff_half + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvectors of the upper triangular `t`: `y_k` solves `(T − t_kk) y = 0`.
fn triangular_eigenvectors(n: usize, t: &[C64]) -> Vec<Vec<C64>> {
    let tnorm = t.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let small = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[k * n + k];
        let mut y = vec![ZERO; k + 1];
        y[k] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[i * n + j] * y[j];
            }
            let mut den = t[i * n + i] - lambda;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            y[i] = -s / den;
            let big = y[i].norm();
            if big > 1e150 {
                for v in y.iter_mut() {
                    *v /= big;
                }
            }
        }
        out.push(y);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn diagonal() {
        let m = DenseComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let ev = sorted(
            eig_complex(&m)
                .unwrap()
                .into_iter()
                .map(|p| p.value)
                .collect(),
        );
        assert!((ev[0] - c(0.0, 2.0)).norm() < 1e-14);
        assert!((ev[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let m = DenseComplexMatrix::from_rows(&[
            &[c(0.0, 0.0), c(1.0, 0.0)],
            &[c(-1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let ev = sorted(
            eig_complex(&m)
                .unwrap()
                .into_iter()
                .map(|p| p.value)
                .collect(),
        );
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-13);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn companion_matrix() {
        // z^2 - 3z + 2
        let m = DenseComplexMatrix::from_rows(&[
            &[c(3.0, 0.0), c(-2.0, 0.0)],
            &[c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let ev = sorted(
            eig_complex(&m)
                .unwrap()
                .into_iter()
                .map(|p| p.value)
                .collect(),
        );
        assert!((ev[0] - c(1.0, 0.0)).norm() < 1e-13);
        assert!((ev[1] - c(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn residuals_on_nonnormal_matrix() {
        let n = 30;
        let m = DenseComplexMatrix::from_fn(n, |i, j| {
            let x = ((i * 31 + j * 17) % 13) as f64 / 13.0 - 0.5;
            let y = ((i * 7 + j * 29) % 11) as f64 / 11.0 - 0.5;
            c(x, y) + if j == i + 1 { c(3.0, 0.0) } else { c(0.0, 0.0) }
        });
        let pairs = eig_complex(&m).unwrap();
        let mn = m.frobenius_norm();
        for p in &pairs {
            assert!(p.residual <= EIG_TOL * mn, "residual {}", p.residual);
        }
        // trace check
        let tr: C64 = (0..n).map(|i| m[(i, i)]).sum();
        let s: C64 = pairs.iter().map(|p| p.value).sum();
        assert!((tr - s).norm() < 1e-10 * mn);
    }

    #[test]
    fn jordan_block_handled() {
        let m = DenseComplexMatrix::from_rows(&[
            &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let pairs = eig_complex(&m).unwrap();
        for p in pairs {
            assert!((p.value - c(2.0, 0.0)).norm() < 1e-12);
            assert!(p.residual <= EIG_TOL * m.frobenius_norm());
        }
    }
}
