use alloc::vec::Vec;

use super::matrix::DenseComplexMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// `P M = L U` with partial pivoting; unit lower `L` and `U` packed together.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    /// Smallest |pivot| divided by the max-abs entry of the input.
    pub min_pivot_ratio: f64,
}

impl Lu {
    /// Fails with [`Error::Singular`] if a pivot is below `n·ε·max|M|`.
    pub fn factor(m: &DenseComplexMatrix) -> Result<Self> {
        let n = m.order();
        let mut a = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs();
        let tiny = (n.max(1) as f64) * f64::EPSILON * scale;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].norm();
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            min_pivot = min_pivot.min(best);
            if best <= tiny || best == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                let (top, bottom) = a.split_at_mut(i * n);
                let rk = &top[k * n + k + 1..k * n + n];
                let ri = &mut bottom[k + 1..n];
                for (x, y) in ri.iter_mut().zip(rk) {
                    *x -= f * y;
                }
            }
        }
        let ratio = if scale > 0.0 { min_pivot / scale } else { 0.0 };
        Ok(Self {
            n,
            lu: a,
            perm,
            min_pivot_ratio: ratio,
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Solve `M x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solve `M^* x = b`, using `M^* = U^* L^* P`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = b.to_vec();
        // U^* y' = b  (lower triangular with diagonal conj(u_ii))
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = s / self.lu[i * n + i].conj();
        }
        // L^* z = y'  (unit upper triangular)
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = s;
        }
        // x = P^T z
        let mut x = alloc::vec![C64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}
