//! Extreme singular values of dense complex matrices.
//!
//! Both routines run Golub–Kahan–Lanczos bidiagonalization with full
//! reorthogonalization (a Krylov-accelerated power iteration on `M*M`),
//! restarted from the current top Ritz vector until the Ritz value settles.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use super::lu::Lu;
use super::matrix::{dot, vec_norm, DenseComplexMatrix};
use super::tridiag;
use crate::error::Error;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Something that can apply `A` and `A*`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for DenseComplexMatrix {
    fn dim(&self) -> usize {
        self.order()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec(x, y)
    }
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_adjoint(x, y)
    }
}

struct Inverse<'a>(&'a Lu);

impl LinearOperator for Inverse<'_> {
    fn dim(&self) -> usize {
        self.0.order()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&self.0.solve(x));
    }
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&self.0.solve_adjoint(x));
    }
}

/// Result of [`largest_singular_value_op`].
#[derive(Debug, Clone, PartialEq)]
pub struct TopSingular {
    pub sigma: f64,
    /// Right singular vector estimate (unit norm).
    pub vector: Vec<C64>,
    pub converged: bool,
}

/// Largest singular value of `m` (relative accuracy ~1e-12 when converged).
pub fn largest_singular_value(m: &DenseComplexMatrix) -> f64 {
    largest_singular_value_op(m).sigma
}

/// Smallest singular value and whether the matrix was numerically singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMin {
    pub sigma: f64,
    pub singular: bool,
}

/// Smallest singular value as `1/σ_max(M⁻¹)`; singular input gives `0` with the flag set.
pub fn smallest_singular_value(m: &DenseComplexMatrix) -> SigmaMin {
    if m.order() == 0 {
        return SigmaMin {
            sigma: 0.0,
            singular: true,
        };
    }
    match Lu::factor(m) {
        Err(Error::Singular) | Err(_) => SigmaMin {
            sigma: 0.0,
            singular: true,
        },
        Ok(lu) => {
            let top = largest_singular_value_op(&Inverse(&lu));
            if !(top.sigma.is_finite()) || top.sigma == 0.0 {
                SigmaMin {
                    sigma: 0.0,
                    singular: true,
                }
            } else {
                SigmaMin {
                    sigma: 1.0 / top.sigma,
                    singular: false,
                }
            }
        }
    }
}

fn start_vector(n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|k| {
            let t = (k as f64 + 1.0) * 0.754_877_666_246_692_7;
            C64::new(
                1.0 + 0.5 * (t.fract() - 0.5),
                0.3 * ((t * 1.7).fract() - 0.5),
            )
        })
        .collect();
    let nrm = vec_norm(&v);
    for x in v.iter_mut() {
        *x /= nrm;
    }
    v
}

fn reorthogonalize(basis: &[Vec<C64>], w: &mut [C64]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
}

/// Top singular triple of a linear operator.
pub fn largest_singular_value_op<A: LinearOperator + ?Sized>(a: &A) -> TopSingular {
    let n = a.dim();
    if n == 0 {
        return TopSingular {
            sigma: 0.0,
            vector: Vec::new(),
            converged: true,
        };
    }
    let kmax = n.min(64);
    let mut v0 = start_vector(n);
    let mut prev = -1.0f64;
    let mut best = TopSingular {
        sigma: 0.0,
        vector: v0.clone(),
        converged: false,
    };
    for _restart in 0..40 {
        let mut vs: Vec<Vec<C64>> = Vec::with_capacity(kmax);
        let mut us: Vec<Vec<C64>> = Vec::with_capacity(kmax);
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut v = v0.clone();
        let mut u = vec![ZERO; n];
        let mut w = vec![ZERO; n];
        let mut beta_prev = 0.0;
        for j in 0..kmax {
            a.apply(&v, &mut u);
            if j > 0 {
                let up = &us[j - 1];
                for (ui, pi) in u.iter_mut().zip(up) {
                    *ui -= pi * beta_prev;
                }
            }
            reorthogonalize(&us, &mut u);
            let alpha = vec_norm(&u);
            vs.push(v.clone());
            if alpha == 0.0 {
                alphas.push(0.0);
                break;
            }
            for x in u.iter_mut() {
                *x /= alpha;
            }
            alphas.push(alpha);
            us.push(u.clone());
            a.apply_adjoint(&u, &mut w);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= vi * alpha;
            }
            reorthogonalize(&vs, &mut w);
            let beta = vec_norm(&w);
            if j + 1 == kmax || beta <= 1e-14 * alpha {
                break;
            }
            betas.push(beta);
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / beta;
            }
            beta_prev = beta;
        }
        // B is upper bidiagonal k×k (diag alphas, super betas); BᵀB tridiagonal.
        let k = alphas.len();
        let mut d = vec![0.0; k];
        let mut e = vec![0.0; k.saturating_sub(1)];
        for i in 0..k {
            d[i] = alphas[i] * alphas[i]
                + if i > 0 {
                    betas[i - 1] * betas[i - 1]
                } else {
                    0.0
                };
            if i + 1 < k {
                e[i] = alphas[i] * betas[i];
            }
        }
        let theta = match tridiag::symmetric_eigenvalues(&d, &e) {
            Ok(ev) => *ev.last().unwrap_or(&0.0),
            Err(_) => d.iter().copied().fold(0.0, f64::max),
        };
        let y = if k > 0 {
            tridiag::symmetric_eigenvector(&d, &e, theta)
        } else {
            Vec::new()
        };
        let mut ritz = vec![ZERO; n];
        for (yi, vi) in y.iter().zip(&vs) {
            for (r, x) in ritz.iter_mut().zip(vi) {
                *r += x * *yi;
            }
        }
        let rn = vec_norm(&ritz);
        if rn > 0.0 {
            for r in ritz.iter_mut() {
                *r /= rn;
            }
        }
        // Lower bound from the Ritz vector itself, and its residual.
        a.apply(&ritz, &mut u);
        let sigma_vec = vec_norm(&u);
        a.apply_adjoint(&u, &mut w);
        let theta_vec = sigma_vec * sigma_vec;
        let mut r2 = 0.0;
        for (wi, xi) in w.iter().zip(&ritz) {
            r2 += (wi - xi * theta_vec).norm_sqr();
        }
        let resid = r2.sqrt();
        let sigma = theta.max(0.0).sqrt().max(sigma_vec);
        let exhausted = k < kmax || kmax == n;
        let settled = prev >= 0.0 && (sigma - prev).abs() <= 1e-13 * sigma.max(f64::MIN_POSITIVE);
        let small_resid = resid <= 1e-10 * theta_vec.max(f64::MIN_POSITIVE);
        best = TopSingular {
            sigma,
            vector: ritz.clone(),
            converged: exhausted || settled || small_resid,
        };
        if best.converged || sigma == 0.0 {
            best.converged = true;
            return best;
        }
        prev = sigma;
        v0 = ritz;
    }
    best
}
