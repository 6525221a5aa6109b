//! Finite-difference discretizations of `H_V = −Δ + V`, their spectra and
//! pseudospectra, and the scaled plane-wave singular sequence.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, unsupported, Error, Result};
use crate::numerics::eig::{eig_complex, EIG_TOL};
use crate::numerics::matrix::DenseComplexMatrix;
use crate::numerics::quadrature::composite_gauss;
use crate::numerics::svd::smallest_singular_value;
use crate::numerics::tridiag::{symmetric_eigenvalues, symmetric_eigenvector};
use crate::potential::Potential;
use crate::{par_map, C64};

/// Largest box grid handled by the dense eigensolver.
pub const BOX_MAX_POINTS: usize = 20 * 20 * 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorKind {
    RadialSector { ell: usize },
    Box3d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
}

/// A finite matrix standing in for `H_V`.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub kind: OperatorKind,
    pub matrix: DenseComplexMatrix,
    pub h: f64,
    /// `R` for radial sectors, `L` for boxes.
    pub domain_radius: f64,
    pub boundary: Boundary,
    pub dimension: usize,
    pub potential: Potential,
    /// Grid values of `V` (the potential part of the diagonal).
    pub v_diag: Vec<C64>,
    /// Diagonal and off-diagonal when the radial matrix is real.
    real_tridiagonal: Option<(Vec<f64>, Vec<f64>)>,
}

impl DiscretizedOperator {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    /// The same discretization with `V ≡ 0`.
    pub fn free_matrix(&self) -> DenseComplexMatrix {
        let mut m = self.matrix.clone();
        for (i, v) in self.v_diag.iter().enumerate() {
            let n = m.order();
            m.as_mut_slice()[i * n + i] -= v;
        }
        m
    }

    pub fn is_real_tridiagonal(&self) -> bool {
        self.real_tridiagonal.is_some()
    }
}

/// `−u'' + (ℓ(ℓ+1)/r² + V(r)) u` on `r_j = j h`, `h = R/(n+1)`, Dirichlet at 0 and `R`.
pub fn discretize_radial(
    v: &Potential,
    ell: usize,
    r: f64,
    n: usize,
) -> Result<DiscretizedOperator> {
    if n < 8 {
        return Err(invalid("n", "at least 8 interior points required"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("R", "must be positive and finite"));
    }
    if v.dimension != 3 {
        return Err(unsupported(
            "discretize_radial",
            "radial sectors are built for d = 3",
        ));
    }
    if !v.is_radial() {
        return Err(unsupported(
            "discretize_radial",
            "requires a radial potential",
        ));
    }
    let h = r / (n as f64 + 1.0);
    let lf = ell as f64;
    let nodes: Vec<f64> = (1..=n).map(|j| j as f64 * h).collect();
    let v_diag: Vec<C64> = nodes.iter().map(|&x| v.radial(x)).collect();
    let diag: Vec<C64> = nodes
        .iter()
        .zip(&v_diag)
        .map(|(&x, vv)| vv + 2.0 / (h * h) + lf * (lf + 1.0) / (x * x))
        .collect();
    let off = -1.0 / (h * h);
    let matrix = DenseComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            diag[i]
        } else if i.abs_diff(j) == 1 {
            C64::new(off, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let real_tridiagonal = if v_diag.iter().all(|x| x.im == 0.0) {
        Some((diag.iter().map(|x| x.re).collect(), vec![off; n - 1]))
    } else {
        None
    };
    Ok(DiscretizedOperator {
        kind: OperatorKind::RadialSector { ell },
        matrix,
        h,
        domain_radius: r,
        boundary: Boundary::Dirichlet,
        dimension: 3,
        potential: *v,
        v_diag,
        real_tridiagonal,
    })
}

/// 7-point Laplacian plus `V` on `(−L, L)³`, nodes `−L + i h`, `h = 2L/(n+1)`.
/// `n` must be even so the origin is not a node.
pub fn discretize_box(v: &Potential, l: f64, n: usize) -> Result<DiscretizedOperator> {
    if v.dimension != 3 {
        return Err(unsupported("discretize_box", "requires dimension 3"));
    }
    if n < 2 || n % 2 != 0 {
        return Err(invalid(
            "n",
            "must be even and at least 2 so that no node sits at the origin",
        ));
    }
    if n * n * n > BOX_MAX_POINTS {
        return Err(Error::TooLarge(alloc::format!(
            "{n}^3 box points exceed the dense limit 20^3; use a radial sector instead"
        )));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(invalid("L", "must be positive and finite"));
    }
    let h = 2.0 * l / (n as f64 + 1.0);
    let coord = |i: usize| -l + (i as f64 + 1.0) * h;
    let total = n * n * n;
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut v_diag = vec![C64::new(0.0, 0.0); total];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                v_diag[idx(i, j, k)] = v.eval(&[coord(i), coord(j), coord(k)]);
            }
        }
    }
    let inv = 1.0 / (h * h);
    let mut data = vec![C64::new(0.0, 0.0); total * total];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = idx(i, j, k);
                data[p * total + p] = v_diag[p] + 6.0 * inv;
                let mut link = |q: usize| data[p * total + q] = C64::new(-inv, 0.0);
                if i > 0 {
                    link(idx(i - 1, j, k));
                }
                if i + 1 < n {
                    link(idx(i + 1, j, k));
                }
                if j > 0 {
                    link(idx(i, j - 1, k));
                }
                if j + 1 < n {
                    link(idx(i, j + 1, k));
                }
                if k > 0 {
                    link(idx(i, j, k - 1));
                }
                if k + 1 < n {
                    link(idx(i, j, k + 1));
                }
            }
        }
    }
    Ok(DiscretizedOperator {
        kind: OperatorKind::Box3d,
        matrix: DenseComplexMatrix::from_row_major(total, data)?,
        h,
        domain_radius: l,
        boundary: Boundary::Dirichlet,
        dimension: 3,
        potential: *v,
        v_diag,
        real_tridiagonal: None,
    })
}

/// Distance from `z` to `[0, +∞)`.
pub fn distance_to_half_line(z: C64) -> f64 {
    if z.re >= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Eigenvalues with residuals and the outliers off `[0, +∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    pub residuals: Vec<f64>,
    /// Indices into `eigenvalues`.
    pub outliers: Vec<usize>,
    pub continuum_floor: f64,
    pub outlier_tol: f64,
    /// `1e-10 · ‖M‖_F`, the residual bound every pair meets.
    pub residual_bound: f64,
    /// Unit eigenvectors of the outliers, in the order of `outliers`.
    #[serde(skip)]
    pub outlier_vectors: Vec<Vec<C64>>,
}

impl SpectrumReport {
    pub fn outlier_values(&self) -> Vec<C64> {
        self.outliers.iter().map(|&i| self.eigenvalues[i]).collect()
    }

    pub fn is_outlier(&self, i: usize) -> bool {
        self.outliers.contains(&i)
    }
}

/// Smallest eigenvalue of the free operator on the same grid.
pub fn continuum_floor(op: &DiscretizedOperator) -> Result<f64> {
    let h2 = op.h * op.h;
    match op.kind {
        OperatorKind::RadialSector { ell } => {
            let n = op.order();
            let lf = ell as f64;
            let d: Vec<f64> = (1..=n)
                .map(|j| 2.0 / h2 + lf * (lf + 1.0) / ((j as f64 * op.h).powi(2)))
                .collect();
            let e = vec![-1.0 / h2; n - 1];
            Ok(symmetric_eigenvalues(&d, &e)?[0])
        }
        OperatorKind::Box3d => {
            let n = round_cbrt(op.order());
            let one = (2.0 - 2.0 * (PI / (n as f64 + 1.0)).cos()) / h2;
            Ok(3.0 * one)
        }
    }
}

fn round_cbrt(m: usize) -> usize {
    let mut n = 1;
    while n * n * n < m {
        n += 1;
    }
    n
}

/// Full eigendecomposition. `outlier_tol = None` uses `10 ·` the continuum floor.
pub fn spectrum(op: &DiscretizedOperator, outlier_tol: Option<f64>) -> Result<SpectrumReport> {
    let floor = continuum_floor(op)?;
    let tol = outlier_tol.unwrap_or(10.0 * floor);
    if !(tol >= 0.0) {
        return Err(invalid("outlier_tol", "must be non-negative"));
    }
    let mnorm = op.matrix.frobenius_norm();
    let residual_bound = EIG_TOL * mnorm;
    let (values, residuals, vectors): (Vec<C64>, Vec<f64>, Vec<Vec<C64>>) =
        match &op.real_tridiagonal {
            Some((d, e)) => {
                let vals = symmetric_eigenvalues(d, e)?;
                let pairs: Vec<(f64, Vec<f64>)> = par_map(vals.len(), |k| {
                    let v = symmetric_eigenvector(d, e, vals[k]);
                    (tridiag_residual(d, e, vals[k], &v), v)
                });
                let mut res = Vec::with_capacity(vals.len());
                let mut vecs = Vec::with_capacity(vals.len());
                for (r, v) in pairs {
                    res.push(r);
                    vecs.push(v.into_iter().map(|x| C64::new(x, 0.0)).collect());
                }
                (
                    vals.into_iter().map(|x| C64::new(x, 0.0)).collect(),
                    res,
                    vecs,
                )
            }
            None => {
                let mut pairs = eig_complex(&op.matrix)?;
                pairs.sort_by(|a, b| {
                    a.value
                        .re
                        .partial_cmp(&b.value.re)
                        .unwrap()
                        .then(a.value.im.partial_cmp(&b.value.im).unwrap())
                });
                let vals = pairs.iter().map(|p| p.value).collect();
                let res = pairs.iter().map(|p| p.residual).collect();
                let vecs = pairs.into_iter().map(|p| p.vector).collect();
                (vals, res, vecs)
            }
        };
    let outliers: Vec<usize> = (0..values.len())
        .filter(|&i| distance_to_half_line(values[i]) > tol)
        .collect();
    let outlier_vectors = outliers.iter().map(|&i| vectors[i].clone()).collect();
    Ok(SpectrumReport {
        eigenvalues: values,
        residuals,
        outliers,
        continuum_floor: floor,
        outlier_tol: tol,
        residual_bound,
        outlier_vectors,
    })
}

fn tridiag_residual(d: &[f64], e: &[f64], mu: f64, v: &[f64]) -> f64 {
    let n = d.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut y = (d[i] - mu) * v[i];
        if i > 0 {
            y += e[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            y += e[i] * v[i + 1];
        }
        s += y * y;
    }
    s.sqrt()
}

/// Rectangle of spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl ZWindow {
    pub fn points(&self) -> Result<Vec<C64>> {
        if self.n_re == 0 || self.n_im == 0 {
            return Err(invalid("z_window", "needs at least one point per axis"));
        }
        if !(self.re_min <= self.re_max && self.im_min <= self.im_max) {
            return Err(invalid("z_window", "min must not exceed max"));
        }
        let step = |a: f64, b: f64, n: usize, k: usize| {
            if n == 1 {
                a
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.n_re * self.n_im);
        for j in 0..self.n_im {
            for i in 0..self.n_re {
                out.push(C64::new(
                    step(self.re_min, self.re_max, self.n_re, i),
                    step(self.im_min, self.im_max, self.n_im, j),
                ));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoPoint {
    pub z_re: f64,
    pub z_im: f64,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pseudospectrum {
    pub points: Vec<PseudoPoint>,
    /// `(ε, number of grid points with σ_min ≤ ε)`.
    pub level_counts: Vec<(f64, usize)>,
}

/// `σ_min(M − z)` for each `z`.
pub fn pseudospectrum(op: &DiscretizedOperator, z_grid: &[C64], levels: &[f64]) -> Pseudospectrum {
    let points: Vec<PseudoPoint> = par_map(z_grid.len(), |k| {
        let z = z_grid[k];
        let s = smallest_singular_value(&op.matrix.shifted(z));
        PseudoPoint {
            z_re: z.re,
            z_im: z.im,
            sigma_min: s.sigma,
        }
    });
    let level_counts = levels
        .iter()
        .map(|&e| (e, points.iter().filter(|p| p.sigma_min <= e).count()))
        .collect();
    Pseudospectrum {
        points,
        level_counts,
    }
}

/// Radial bump `φ₁(r) = c (1 − r²)^m` on the unit ball of `ℝ³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub m: u32,
    pub c: f64,
}

impl BumpProfile {
    /// Unnormalized bump; `m ≥ 3` keeps `Δφ₁` square integrable with margin.
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(invalid("m", "bump exponent must be at least 2"));
        }
        Ok(Self { m, c: 1.0 })
    }

    fn derivs(&self, r: f64) -> (f64, f64, f64) {
        let m = self.m as i32;
        let mf = m as f64;
        let s = 1.0 - r * r;
        let f = s.powi(m);
        let d1 = -2.0 * mf * r * s.powi(m - 1);
        let d2 = -2.0 * mf * s.powi(m - 1) + 4.0 * mf * (mf - 1.0) * r * r * s.powi(m - 2);
        (self.c * f, self.c * d1, self.c * d2)
    }

    /// `(‖φ₁‖, ‖∇φ₁‖, ‖Δφ₁‖)` in `L²(ℝ³)`.
    pub fn norms(&self) -> (f64, f64, f64) {
        let edges: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
        let (x, w) = composite_gauss(&edges, 12);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (r, wt) in x.iter().zip(&w) {
            let (f, d1, d2) = self.derivs(*r);
            let lap = d2 + 2.0 * d1 / r;
            let jac = 4.0 * PI * r * r * wt;
            a += jac * f * f;
            b += jac * d1 * d1;
            c += jac * lap * lap;
        }
        (a.sqrt(), b.sqrt(), c.sqrt())
    }

    pub fn normalized(&self) -> Self {
        let (n, _, _) = self.norms();
        Self {
            m: self.m,
            c: self.c / n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: f64,
    pub grad_norm: f64,
    pub lap_norm: f64,
    /// `‖Δφ_n‖ + 2|k|‖∇φ_n‖`.
    pub residual: f64,
    /// `a ‖∇φ_n‖²`.
    pub potential_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub k_norm: f64,
    pub a: f64,
    pub rows: Vec<SequenceRow>,
    pub residual_slope: f64,
    pub potential_slope: f64,
    /// The profile had to be normalized first.
    pub renormalized: bool,
}

/// Decay of `φ_n(x) = n^{-3/2} φ₁(x/n) e^{ik·x}` using `‖∇φ_n‖ = ‖∇φ₁‖/n`
/// and `‖Δφ_n‖ = ‖Δφ₁‖/n²`.
pub fn singular_sequence_decay(
    phi1: &BumpProfile,
    k: [f64; 3],
    a: f64,
    n_list: &[f64],
) -> Result<SequenceReport> {
    if n_list.len() < 2 || n_list.iter().any(|n| !(*n > 0.0)) {
        return Err(invalid("n_list", "needs at least two positive scales"));
    }
    if !(a >= 0.0) {
        return Err(invalid("a", "must be non-negative"));
    }
    let (norm, _, _) = phi1.norms();
    let renormalized = (norm - 1.0).abs() > 1e-12;
    let p = if renormalized {
        log::warn!("singular_sequence_decay: profile norm {norm}, normalizing");
        phi1.normalized()
    } else {
        *phi1
    };
    let (_, g1, l1) = p.norms();
    let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let rows: Vec<SequenceRow> = n_list
        .iter()
        .map(|&n| {
            let g = g1 / n;
            let l = l1 / (n * n);
            SequenceRow {
                n,
                grad_norm: g,
                lap_norm: l,
                residual: l + 2.0 * kn * g,
                potential_term: a * g * g,
            }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.n).collect();
    let rs: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r.potential_term).collect();
    let residual_slope = crate::bs::loglog_slope(&xs, &rs);
    let potential_slope = if a > 0.0 {
        crate::bs::loglog_slope(&xs, &ps)
    } else {
        f64::NAN
    };
    Ok(SequenceReport {
        k_norm: kn,
        a,
        rows,
        residual_slope,
        potential_slope,
        renormalized,
    })
}
