//! Birman–Schwinger operators `K_z = |V|^{1/2} (H₀ − z)^{-1} V_{1/2}` in three
//! dimensions, reduced to partial waves for radial `V`.
//!
//! Each sector ℓ is an integral operator on `L²(0, ∞; dr)` with kernel
//! `A(r) g_ℓ(r, r') B(r')`, where `A = |V|^{1/2} r`, `B = V_{1/2} r` and
//! `g_ℓ(r, r') = P_ℓ(r_<) Q_ℓ(r_>)`. For `z = 0`, `P_ℓ = r^ℓ/(2ℓ+1)` and
//! `Q_ℓ = r^{-ℓ-1}`; otherwise `P_ℓ = κ i_ℓ(κr)`, `Q_ℓ = k_ℓ(κr)`.
//!
//! The sector is discretized by cell averages on the grid cells
//! (a Galerkin compression), so discrete norms are lower bounds that grow
//! under nested refinement. All cell integrals use the semi-separable form
//! of `g_ℓ`, with products of `P` and `Q` formed in log space.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, unsupported, Result};
use crate::numerics::grid::RadialGrid;
use crate::numerics::lu::Lu;
use crate::numerics::matrix::{vec_norm, DenseComplexMatrix};
use crate::numerics::quadrature::reference_rule;
use crate::numerics::special::{ln_sph_i, ln_sph_k};
use crate::numerics::svd::largest_singular_value;
use crate::potential::{v_half, Potential};
use crate::{par_map, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Default partial-wave truncation.
pub const DEFAULT_ELL_MAX: usize = 32;
/// Slack allowed between `‖K_z‖` and `‖K_0‖` on the same grid.
pub const SCAN_SLACK: f64 = 0.02;

/// `κ = √(−z)` on the principal branch, so `Re κ ≥ 0`.
pub fn kappa(z: C64) -> C64 {
    (-z).sqrt()
}

/// `z` lies on the open half-line `(0, +∞)`.
pub fn on_positive_axis(z: C64) -> bool {
    z.im == 0.0 && z.re > 0.0
}

/// Spectral parameter with its root; `d = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenParams {
    pub z: C64,
    pub kappa: C64,
}

impl GreenParams {
    pub fn new(z: C64) -> Self {
        Self { z, kappa: kappa(z) }
    }
}

/// `G_z(s) = e^{−√(−z) s}/(4π s)`.
pub fn green_function(z: C64, s: f64) -> Result<C64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid("s", "distance must be positive and finite"));
    }
    Ok((-kappa(z) * s).exp() / (4.0 * PI * s))
}

/// `|G_z(s)| = e^{−Re κ s}/(4π s)`, computed without a complex modulus.
pub fn green_modulus(z: C64, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid("s", "distance must be positive and finite"));
    }
    Ok((-kappa(z).re * s).exp() / (4.0 * PI * s))
}

/// Checks `|G_z(s)| ≤ G₀(s)` at every sample.
pub fn pointwise_bound_check(z: C64, samples: &[f64]) -> Result<bool> {
    if on_positive_axis(z) {
        return Err(precondition(
            "pointwise_bound_check",
            "z on the open positive half-line",
        ));
    }
    if !(kappa(z).re >= 0.0) {
        return Ok(false);
    }
    for &s in samples {
        let g = green_modulus(z, s)?;
        let g0 = green_modulus(C64::new(0.0, 0.0), s)?;
        if !(g <= g0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ln P_ℓ(r)` and `ln Q_ℓ(r)` for `ℓ = 0..=lmax`.
fn ln_pq(kap: Option<C64>, r: f64, lmax: usize) -> (Vec<C64>, Vec<C64>) {
    match kap {
        None => {
            let lr = r.ln();
            let p = (0..=lmax)
                .map(|l| C64::new(l as f64 * lr - ((2 * l + 1) as f64).ln(), 0.0))
                .collect();
            let q = (0..=lmax)
                .map(|l| C64::new(-((l + 1) as f64) * lr, 0.0))
                .collect();
            (p, q)
        }
        Some(k) => {
            let x = k * r;
            let lk = k.ln();
            let p = ln_sph_i(x, lmax).into_iter().map(|v| v + lk).collect();
            let q = ln_sph_k(x, lmax);
            (p, q)
        }
    }
}

fn kappa_option(z: C64) -> Option<C64> {
    if z == ZERO {
        None
    } else {
        Some(kappa(z))
    }
}

/// Partial-wave radial Green function `g_ℓ^z(r, r')`, normalized so that
/// `G_z(x, y) = Σ_ℓ g_ℓ(|x|, |y|) (2ℓ+1)/(4π) P_ℓ(cos θ)`.
pub fn partial_wave_green(z: C64, l: usize, r: f64, rp: f64) -> C64 {
    let k = kappa_option(z);
    let (lo, hi) = if r <= rp { (r, rp) } else { (rp, r) };
    let (p, _) = ln_pq(k, lo, l);
    let (_, q) = ln_pq(k, hi, l);
    (p[l] + q[l]).exp()
}

/// Split `[lo, hi]` into panels whose endpoint ratio is at most `rho`.
/// A panel touching 0 is cut at `hi·1e-7`.
fn geometric_panels(lo: f64, hi: f64, rho: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let start = if lo == 0.0 {
        let floor = hi * 1e-7;
        out.push((0.0, floor));
        floor
    } else {
        lo
    };
    let ratio = hi / start;
    let k = if ratio <= rho {
        1
    } else {
        (ratio.ln() / rho.ln()).ceil() as usize
    };
    let step = ratio.powf(1.0 / k as f64);
    let mut a = start;
    for j in 0..k {
        let b = if j + 1 == k { hi } else { a * step };
        out.push((a, b));
        a = b;
    }
    out
}

/// Radial weights multiplying the Green kernel: `A(r) g(r, r') B(r')`.
pub struct Weights<'a> {
    pub left: &'a (dyn Fn(f64) -> C64 + Sync),
    pub right: &'a (dyn Fn(f64) -> C64 + Sync),
}

struct CellData {
    lnp_c: Vec<C64>,
    lnq_c: Vec<C64>,
    ap: Vec<C64>,
    aq: Vec<C64>,
    bp: Vec<C64>,
    bq: Vec<C64>,
    diag: Vec<C64>,
}

struct Ctx<'a> {
    kap: Option<C64>,
    lmax: usize,
    x: Vec<f64>,
    w: Vec<f64>,
    weights: &'a Weights<'a>,
}

impl Ctx<'_> {
    fn cell(&self, lo: f64, hi: f64, rho: f64) -> CellData {
        let lmax = self.lmax;
        let nl = lmax + 1;
        let c = 0.5 * (lo + hi);
        let (lnp_c, lnq_c) = ln_pq(self.kap, c, lmax);
        let mut ap = vec![ZERO; nl];
        let mut aq = vec![ZERO; nl];
        let mut bp = vec![ZERO; nl];
        let mut bq = vec![ZERO; nl];
        let mut diag = vec![ZERO; nl];
        let panels = geometric_panels(lo, hi, rho);
        let q = self.x.len();
        // Per panel: nodes, weights, log factors.
        struct Panel {
            a: f64,
            b: f64,
            nodes: Vec<f64>,
            wts: Vec<f64>,
            lp: Vec<Vec<C64>>,
            lq: Vec<Vec<C64>>,
            lp_a: Vec<C64>,
            lp_b: Vec<C64>,
            lq_a: Vec<C64>,
            lq_b: Vec<C64>,
        }
        let mut pan: Vec<Panel> = Vec::with_capacity(panels.len());
        for &(a, b) in &panels {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let nodes: Vec<f64> = self.x.iter().map(|t| mid + half * t).collect();
            let wts: Vec<f64> = self.w.iter().map(|v| half * v).collect();
            let mut lp = Vec::with_capacity(q);
            let mut lq = Vec::with_capacity(q);
            for &r in &nodes {
                let (p, qq) = ln_pq(self.kap, r, lmax);
                lp.push(p);
                lq.push(qq);
            }
            let (lp_a, lq_a) = if a > 0.0 {
                ln_pq(self.kap, a, lmax)
            } else {
                (vec![ZERO; nl], vec![ZERO; nl])
            };
            let (lp_b, lq_b) = ln_pq(self.kap, b, lmax);
            pan.push(Panel {
                a,
                b,
                nodes,
                wts,
                lp,
                lq,
                lp_a,
                lp_b,
                lq_a,
                lq_b,
            });
        }
        // Off-diagonal factors.
        for p in &pan {
            for k in 0..q {
                let r = p.nodes[k];
                let av = (self.weights.left)(r) * p.wts[k];
                let bv = (self.weights.right)(r) * p.wts[k];
                for l in 0..nl {
                    let ep = (p.lp[k][l] - lnp_c[l]).exp();
                    let eq = (p.lq[k][l] - lnq_c[l]).exp();
                    ap[l] += av * ep;
                    aq[l] += av * eq;
                    bp[l] += bv * ep;
                    bq[l] += bv * eq;
                }
            }
        }
        // Diagonal: forward part ∫ A(x) Q(x) ∫_{lo}^{x} B P, carried as S/P(x).
        let mut s_hat = vec![ZERO; nl]; // scaled by P at current panel start
        let mut started = false;
        for p in &pan {
            for k in 0..q {
                let x = p.nodes[k];
                let partial = self.partial(p.a, x, true, lmax);
                let (lpx, lqx) = (&p.lp[k], &p.lq[k]);
                let av = (self.weights.left)(x) * p.wts[k];
                for l in 0..nl {
                    let carried = if started {
                        s_hat[l] * (p.lp_a[l] - lpx[l]).exp()
                    } else {
                        ZERO
                    };
                    let sx = carried + partial[l];
                    diag[l] += av * (lqx[l] + lpx[l]).exp() * sx;
                }
            }
            // advance to b
            for l in 0..nl {
                let carried = if started {
                    s_hat[l] * (p.lp_a[l] - p.lp_b[l]).exp()
                } else {
                    ZERO
                };
                let mut full = ZERO;
                for k in 0..q {
                    full += (self.weights.right)(p.nodes[k])
                        * p.wts[k]
                        * (p.lp[k][l] - p.lp_b[l]).exp();
                }
                s_hat[l] = carried + full;
            }
            started = true;
        }
        // Backward part ∫ A(x) P(x) ∫_{x}^{hi} B Q, carried as T/Q(x).
        let mut t_hat = vec![ZERO; nl];
        let mut started = false;
        for p in pan.iter().rev() {
            for k in 0..q {
                let x = p.nodes[k];
                let partial = self.partial(x, p.b, false, lmax);
                let (lpx, lqx) = (&p.lp[k], &p.lq[k]);
                let av = (self.weights.left)(x) * p.wts[k];
                for l in 0..nl {
                    let carried = if started {
                        t_hat[l] * (p.lq_b[l] - lqx[l]).exp()
                    } else {
                        ZERO
                    };
                    let tx = carried + partial[l];
                    diag[l] += av * (lqx[l] + lpx[l]).exp() * tx;
                }
            }
            if p.a > 0.0 {
                for l in 0..nl {
                    let carried = if started {
                        t_hat[l] * (p.lq_b[l] - p.lq_a[l]).exp()
                    } else {
                        ZERO
                    };
                    let mut full = ZERO;
                    for k in 0..q {
                        full += (self.weights.right)(p.nodes[k])
                            * p.wts[k]
                            * (p.lq[k][l] - p.lq_a[l]).exp();
                    }
                    t_hat[l] = carried + full;
                }
            }
            started = true;
        }
        let h = hi - lo;
        for l in 0..nl {
            diag[l] /= h;
        }
        CellData {
            lnp_c,
            lnq_c,
            ap,
            aq,
            bp,
            bq,
            diag,
        }
    }

    /// `∫_a^b B(y) e^{ln P(y) − ln P(b)} dy` (forward, scaled at the upper end)
    /// or `∫_a^b B(y) e^{ln Q(y) − ln Q(a)} dy` (backward, scaled at the lower end).
    fn partial(&self, a: f64, b: f64, forward: bool, lmax: usize) -> Vec<C64> {
        let nl = lmax + 1;
        let mut out = vec![ZERO; nl];
        if b <= a {
            return out;
        }
        let anchor = if forward { b } else { a };
        let (lp0, lq0) = ln_pq(self.kap, anchor, lmax);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, wt) in self.x.iter().zip(&self.w) {
            let y = mid + half * t;
            let bv = (self.weights.right)(y) * (half * wt);
            let (lp, lq) = ln_pq(self.kap, y, lmax);
            for l in 0..nl {
                let e = if forward {
                    (lp[l] - lp0[l]).exp()
                } else {
                    (lq[l] - lq0[l]).exp()
                };
                out[l] += bv * e;
            }
        }
        out
    }
}

/// Assembled Birman–Schwinger operator on a radial grid.
#[derive(Debug, Clone)]
pub struct BSMatrix {
    pub z: C64,
    /// Matrix of the sector with the largest norm.
    pub matrix: DenseComplexMatrix,
    pub dominant_ell: usize,
    pub grid: RadialGrid,
    pub ell_max: usize,
    pub per_ell_norms: Vec<f64>,
    /// Frobenius norm of each sector matrix.
    pub per_ell_frobenius: Vec<f64>,
    pub norm: f64,
    pub tail_warning: bool,
}

impl BSMatrix {
    /// `sqrt(Σ_ℓ (2ℓ+1) ‖M_ℓ‖_F²)`: HS norm of the discretized operator.
    pub fn discrete_hs_norm(&self) -> f64 {
        self.per_ell_frobenius
            .iter()
            .enumerate()
            .map(|(l, f)| (2 * l + 1) as f64 * f * f)
            .sum::<f64>()
            .sqrt()
    }

    pub fn summary(&self) -> BSSummary {
        BSSummary {
            z_re: self.z.re,
            z_im: self.z.im,
            norm: self.norm,
            hs_norm: self.discrete_hs_norm(),
            per_ell_norms: self.per_ell_norms.clone(),
            tail_warning: self.tail_warning,
        }
    }
}

/// JSON-facing summary of a [`BSMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BSSummary {
    pub z_re: f64,
    pub z_im: f64,
    pub norm: f64,
    pub hs_norm: f64,
    pub per_ell_norms: Vec<f64>,
    pub tail_warning: bool,
}

/// Sub-quadrature order inside each panel.
const PANEL_ORDER: usize = 6;

fn panel_ratio(ell_max: usize) -> f64 {
    (1.0 + 2.5 / (ell_max as f64 + 2.0)).clamp(1.02, 1.5)
}

/// Cell-averaged sector matrices of `A g_ℓ^z B` for `ℓ ≤ ell_max`.
pub fn assemble_weighted(
    weights: &Weights<'_>,
    z: C64,
    grid: &RadialGrid,
    ell_max: usize,
) -> Result<BSMatrix> {
    if on_positive_axis(z) {
        return Err(precondition(
            "assemble_bs",
            "z on the open positive half-line; use an ε-offset",
        ));
    }
    let (x, w) = reference_rule(PANEL_ORDER);
    let ctx = Ctx {
        kap: kappa_option(z),
        lmax: ell_max,
        x,
        w,
        weights,
    };
    let rho = panel_ratio(ell_max);
    let n = grid.len();
    let cells: Vec<CellData> = par_map(n, |i| ctx.cell(grid.edges[i], grid.edges[i + 1], rho));
    let sq: Vec<f64> = grid.weights.iter().map(|h| h.sqrt()).collect();
    let sectors: Vec<(f64, f64, Option<DenseComplexMatrix>)> = par_map(ell_max + 1, |l| {
        let m = DenseComplexMatrix::from_fn(n, |i, j| {
            let v = if i == j {
                cells[i].diag[l]
            } else if i < j {
                cells[i].ap[l] * cells[j].bq[l] * (cells[i].lnp_c[l] + cells[j].lnq_c[l]).exp()
                    / (sq[i] * sq[j])
            } else {
                cells[i].aq[l] * cells[j].bp[l] * (cells[i].lnq_c[l] + cells[j].lnp_c[l]).exp()
                    / (sq[i] * sq[j])
            };
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                ZERO
            }
        });
        let s = largest_singular_value(&m);
        let f = m.frobenius_norm();
        (s, f, Some(m))
    })
    .into_iter()
    .collect();
    let mut per_ell_norms = Vec::with_capacity(ell_max + 1);
    let mut per_ell_frobenius = Vec::with_capacity(ell_max + 1);
    let mut best = 0usize;
    for (l, (s, f, _)) in sectors.iter().enumerate() {
        per_ell_norms.push(*s);
        per_ell_frobenius.push(*f);
        if *s > per_ell_norms[best] {
            best = l;
        }
    }
    let matrix = sectors
        .into_iter()
        .nth(best)
        .and_then(|t| t.2)
        .unwrap_or_else(|| DenseComplexMatrix::zeros(n));
    let norm = per_ell_norms[best];
    let tail_warning =
        ell_max >= 1 && norm > 0.0 && per_ell_norms[ell_max] >= per_ell_norms[ell_max - 1];
    if tail_warning {
        log::warn!("partial-wave norms not decreasing at ell_max = {ell_max}");
    }
    Ok(BSMatrix {
        z,
        matrix,
        dominant_ell: best,
        grid: grid.clone(),
        ell_max,
        per_ell_norms,
        per_ell_frobenius,
        norm,
        tail_warning,
    })
}

fn require_d3(op: &'static str, v: &Potential) -> Result<()> {
    if v.dimension != 3 {
        return Err(unsupported(op, "requires dimension 3"));
    }
    if !v.is_radial() {
        return Err(unsupported(op, "requires a radial potential"));
    }
    Ok(())
}

/// `K_z = |V|^{1/2}(H₀ − z)^{-1} V_{1/2}` for radial `V` in `d = 3`.
pub fn assemble_bs(v: &Potential, z: C64, grid: &RadialGrid, ell_max: usize) -> Result<BSMatrix> {
    require_d3("assemble_bs", v)?;
    let left = |r: f64| C64::new(v.abs(r).sqrt() * r, 0.0);
    let right = |r: f64| v.v_half(r) * r;
    assemble_weighted(
        &Weights {
            left: &left,
            right: &right,
        },
        z,
        grid,
        ell_max,
    )
}

/// `K̃₀ = |V|^{1/2} H₀^{-1} |V|^{1/2}` (non-negative kernel).
pub fn assemble_k_tilde_0(v: &Potential, grid: &RadialGrid, ell_max: usize) -> Result<BSMatrix> {
    require_d3("assemble_k_tilde_0", v)?;
    let f = |r: f64| C64::new(v.abs(r).sqrt() * r, 0.0);
    assemble_weighted(
        &Weights {
            left: &f,
            right: &f,
        },
        ZERO,
        grid,
        ell_max,
    )
}

/// `W^{1/2} H₀^{-1} W^{1/2}` for a non-negative radial weight `W`.
pub fn assemble_weight_operator(
    weight: &(dyn Fn(f64) -> f64 + Sync),
    grid: &RadialGrid,
    ell_max: usize,
) -> Result<BSMatrix> {
    let f = |r: f64| C64::new(weight(r).max(0.0).sqrt() * r, 0.0);
    assemble_weighted(
        &Weights {
            left: &f,
            right: &f,
        },
        ZERO,
        grid,
        ell_max,
    )
}

/// One row of a norm scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub z_re: f64,
    pub z_im: f64,
    pub norm: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScan {
    pub norm_at_zero: f64,
    pub slack: f64,
    pub rows: Vec<ScanRow>,
    /// Every row satisfies `norm(z) ≤ norm(0)(1 + slack)`.
    pub passes: bool,
}

/// `‖K_z‖` for each `z`, compared with `‖K_0‖` on the same grid.
pub fn bs_norm_scan(
    v: &Potential,
    z_list: &[C64],
    grid: &RadialGrid,
    ell_max: usize,
) -> Result<NormScan> {
    for z in z_list {
        if on_positive_axis(*z) {
            return Err(precondition(
                "bs_norm_scan",
                "z on the open positive half-line",
            ));
        }
    }
    let norm0 = assemble_bs(v, ZERO, grid, ell_max)?.norm;
    let mut rows = Vec::with_capacity(z_list.len());
    for &z in z_list {
        let nz = assemble_bs(v, z, grid, ell_max)?.norm;
        rows.push(ScanRow {
            z_re: z.re,
            z_im: z.im,
            norm: nz,
            within_bound: nz <= norm0 * (1.0 + SCAN_SLACK),
        });
    }
    let passes = rows.iter().all(|r| r.within_bound);
    Ok(NormScan {
        norm_at_zero: norm0,
        slack: SCAN_SLACK,
        rows,
        passes,
    })
}

/// Per-sector HS norms of the continuous kernel `A g_ℓ B` on `[0, r_max]`.
///
/// Uses `‖k_ℓ‖² = 2 ∫ |A(r)|² |g_ℓ(r,r)|² ∫_0^r |B(y)|² |P(y)/P(r)|² dy dr`.
/// Only `z = 0` is needed here.
pub fn sector_hs_squared(
    abs_a2: &(dyn Fn(f64) -> f64 + Sync),
    abs_b2: &(dyn Fn(f64) -> f64 + Sync),
    r_max: f64,
    ell_max: usize,
    rho: f64,
) -> Vec<f64> {
    let (x, w) = reference_rule(8);
    let panels = geometric_panels(0.0, r_max, rho);
    par_map(ell_max + 1, |l| {
        let lf = l as f64;
        let two_l = 2.0 * lf;
        let g_diag2 = |r: f64| 1.0 / ((2.0 * lf + 1.0) * (2.0 * lf + 1.0) * r * r);
        let mut total = 0.0;
        let mut t_hat = 0.0; // ∫_0^a |B|² (y/a)^{2ℓ} dy at panel start a
        for &(a, b) in &panels {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (t, wt) in x.iter().zip(&w) {
                let r = mid + half * t;
                // partial ∫_a^r |B|² (y/r)^{2ℓ}
                let mut part = 0.0;
                let h2 = 0.5 * (r - a);
                let m2 = 0.5 * (r + a);
                for (s, ws) in x.iter().zip(&w) {
                    let y = m2 + h2 * s;
                    part += h2 * ws * abs_b2(y) * (y / r).powf(two_l);
                }
                let carried = if a > 0.0 {
                    t_hat * (a / r).powf(two_l)
                } else {
                    0.0
                };
                total += half * wt * abs_a2(r) * g_diag2(r) * (carried + part);
            }
            let mut full = 0.0;
            for (t, wt) in x.iter().zip(&w) {
                let y = mid + half * t;
                full += half * wt * abs_b2(y) * (y / b).powf(two_l);
            }
            t_hat = if a > 0.0 {
                t_hat * (a / b).powf(two_l)
            } else {
                0.0
            } + full;
        }
        2.0 * total
    })
}

/// Result of [`hs_norm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsReport {
    /// Partial-wave route: `sqrt(Σ_ℓ (2ℓ+1)‖k_ℓ‖²)` plus fitted tail.
    pub hs_direct: f64,
    /// Rollnik route: `‖V‖_R/(4π)`.
    pub hs_rollnik: f64,
    /// `|hs_direct − hs_rollnik| / hs_rollnik`.
    pub relative_gap: f64,
    pub per_ell: Vec<f64>,
    pub tail: f64,
    pub divergent: bool,
}

/// HS norm of `K̃₀` two ways: partial waves and the Rollnik integral.
pub fn hs_norm(v: &Potential, grid: &RadialGrid, ell_max: usize) -> Result<HsReport> {
    require_d3("hs_norm", v)?;
    let rollnik = crate::conditions::rollnik_norm(v)?;
    if rollnik.divergent {
        return Ok(HsReport {
            hs_direct: f64::INFINITY,
            hs_rollnik: f64::INFINITY,
            relative_gap: 0.0,
            per_ell: Vec::new(),
            tail: f64::INFINITY,
            divergent: true,
        });
    }
    let a2 = |r: f64| v.abs(r) * r * r;
    let r_max = effective_radius(v, grid.r_max);
    let per_ell = sector_hs_squared(&a2, &a2, r_max, ell_max, 1.01);
    let terms: Vec<f64> = per_ell
        .iter()
        .enumerate()
        .map(|(l, s)| (2 * l + 1) as f64 * s)
        .collect();
    let partial: f64 = terms.iter().sum();
    let l = ell_max as f64;
    let tail = if ell_max >= 1 {
        terms[ell_max] * (l + 0.5) * (l + 0.5) / (l + 1.0)
    } else {
        0.0
    };
    let hs_direct = (partial + tail).sqrt();
    let hs_rollnik = rollnik.value / (4.0 * PI);
    let relative_gap = if hs_rollnik > 0.0 {
        (hs_direct - hs_rollnik).abs() / hs_rollnik
    } else {
        hs_direct
    };
    Ok(HsReport {
        hs_direct,
        hs_rollnik,
        relative_gap,
        per_ell: per_ell.iter().map(|s| s.sqrt()).collect(),
        tail,
        divergent: false,
    })
}

/// Radius beyond which `|V|` is negligible (or the grid radius).
pub(crate) fn effective_radius(v: &Potential, r_max: f64) -> f64 {
    use crate::potential::Decay;
    match v.decay() {
        Decay::Compact(r0) if r0 > 0.0 => r0,
        _ => r_max,
    }
}

/// `‖K_λφ + φ‖/‖φ‖` with `φ = |V|^{1/2}ψ` and `K_λ = |V|^{1/2}(H₀ − λ)^{-1}V_{1/2}`.
pub fn bs_principle_matrix_check(
    h0: &DenseComplexMatrix,
    vdiag: &[C64],
    lambda: C64,
    psi: &[C64],
) -> Result<f64> {
    let n = h0.order();
    if vdiag.len() != n || psi.len() != n {
        return Err(invalid("vdiag", "length must match the matrix order"));
    }
    // H0 + V ψ = λψ must hold to eigen tolerance.
    let mut hv = h0.clone();
    for i in 0..n {
        hv[(i, i)] += vdiag[i];
    }
    let mut r = hv.apply(psi);
    for (ri, p) in r.iter_mut().zip(psi) {
        *ri -= lambda * p;
    }
    let pn = vec_norm(psi);
    if pn == 0.0 {
        return Err(precondition("bs_principle_matrix_check", "ψ = 0"));
    }
    let scale = hv.frobenius_norm().max(1.0);
    if vec_norm(&r) > 1e-8 * scale * pn {
        return Err(precondition(
            "bs_principle_matrix_check",
            "(λ, ψ) is not an eigenpair of H0 + V",
        ));
    }
    let shifted = h0.shifted(lambda);
    let lu = Lu::factor(&shifted)
        .map_err(|_| precondition("bs_principle_matrix_check", "λ lies in the spectrum of H0"))?;
    let sigma_min = crate::numerics::svd::smallest_singular_value(&shifted);
    if sigma_min.singular || sigma_min.sigma < 1e-8 {
        return Err(precondition(
            "bs_principle_matrix_check",
            "λ within 1e-8 of the spectrum of H0",
        ));
    }
    let absq: Vec<C64> = vdiag
        .iter()
        .map(|v| C64::new(v.norm().sqrt(), 0.0))
        .collect();
    let vh: Vec<C64> = vdiag.iter().map(|v| v_half(*v)).collect();
    let phi: Vec<C64> = absq.iter().zip(psi).map(|(a, p)| a * p).collect();
    let t: Vec<C64> = vh.iter().zip(&phi).map(|(a, p)| a * p).collect();
    let s = lu.solve(&t);
    let kphi: Vec<C64> = absq.iter().zip(&s).map(|(a, x)| a * x).collect();
    let diff: Vec<C64> = kphi.iter().zip(&phi).map(|(a, b)| a + b).collect();
    let fn_ = vec_norm(&phi);
    if fn_ == 0.0 {
        return Err(precondition(
            "bs_principle_matrix_check",
            "φ = |V|^{1/2}ψ vanishes",
        ));
    }
    Ok(vec_norm(&diff) / fn_)
}

/// Growth regime of `κ(ε) = Re √(−(λ + iε))` as `ε → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaRegime {
    /// `λ = 0`: `κ ~ |ε|^{1/2}`.
    Threshold,
    /// `λ > 0`: `κ ~ |ε|`.
    Embedded,
    /// otherwise `κ ~ 1`.
    Regular,
}

impl KappaRegime {
    pub fn of(lambda: C64) -> Self {
        if lambda == ZERO {
            Self::Threshold
        } else if lambda.im == 0.0 && lambda.re > 0.0 {
            Self::Embedded
        } else {
            Self::Regular
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            Self::Threshold => 0.5,
            Self::Embedded => 1.0,
            Self::Regular => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaScaling {
    pub rows: Vec<(f64, f64)>,
    pub regime: KappaRegime,
    pub fitted_slope: f64,
    pub passes: bool,
}

/// `κ(ε) = Re √(−(λ + iε))`.
pub fn kappa_eps(lambda: C64, eps: f64) -> f64 {
    kappa(lambda + C64::new(0.0, eps)).re
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.abs().ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Fitted `κ(ε)` slope against the regime exponent (tolerance 0.05).
pub fn kappa_scaling(lambda: C64, eps_list: &[f64]) -> Result<KappaScaling> {
    if eps_list.iter().any(|e| *e == 0.0 || !e.is_finite()) {
        return Err(invalid("eps_list", "ε must be non-zero and finite"));
    }
    let rows: Vec<(f64, f64)> = eps_list
        .iter()
        .map(|&e| (e, kappa_eps(lambda, e)))
        .collect();
    let regime = KappaRegime::of(lambda);
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fitted_slope = if rows.len() >= 2 {
        loglog_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let passes = (fitted_slope - regime.exponent()).abs() <= 0.05;
    Ok(KappaScaling {
        rows,
        regime,
        fitted_slope,
        passes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MEpsRow {
    pub eps: f64,
    pub kappa: f64,
    /// Product quadrature of the HS double integral.
    pub hs_direct: f64,
    /// Closed form `sqrt(∫_Ω|V| / (8πκ))`.
    pub hs_formula: f64,
    /// Upper bound `sqrt(∫_Ω|V| / (4πκ))`.
    pub hs_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MEpsReport {
    pub rows: Vec<MEpsRow>,
    pub l1_on_ball: f64,
    /// Slope of `ε · hs_formula` against `ε`.
    pub eps_hs_slope: f64,
    /// `1 − exponent/2`, the slope `ε·hs` must show.
    pub expected_slope: f64,
    pub max_relative_gap: f64,
}

/// HS norm of `χ_Ω |V|^{1/2} (H₀ − λ − iε)^{-1}` on the ball `Ω` of radius `R`.
pub fn m_eps_hs_check(
    v: &Potential,
    omega_radius: f64,
    lambda: C64,
    eps_list: &[f64],
) -> Result<MEpsReport> {
    require_d3("m_eps_hs_check", v)?;
    if !(omega_radius > 0.0) {
        return Err(invalid("omega_radius", "must be positive"));
    }
    let l1 = crate::conditions::l1_on_ball(v, omega_radius)?;
    if !l1.is_finite() {
        return Err(crate::error::Error::Divergent {
            op: "m_eps_hs_check",
            what: "∫_Ω |V|",
        });
    }
    let (tx, tw) = crate::numerics::quadrature::composite_gauss(
        &(0..=64).map(|k| k as f64).collect::<Vec<_>>(),
        8,
    );
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if eps == 0.0 {
            return Err(invalid("eps_list", "ε must be non-zero"));
        }
        let k = kappa_eps(lambda, eps);
        // ∫_{ℝ³}|G(x−y)|² dy = 4π ∫ s² e^{-2κs}/(16π² s²) ds, with s = t/(2κ).
        let g2: f64 =
            tx.iter().zip(&tw).map(|(t, w)| w * (-t).exp()).sum::<f64>() / (2.0 * k) / (4.0 * PI);
        let hs_direct = (l1 * g2).sqrt();
        let hs_formula = (l1 / (8.0 * PI * k)).sqrt();
        let hs_bound = (l1 / (4.0 * PI * k)).sqrt();
        rows.push(MEpsRow {
            eps,
            kappa: k,
            hs_direct,
            hs_formula,
            hs_bound,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.eps * r.hs_formula).collect();
    let eps_hs_slope = if rows.len() >= 2 {
        loglog_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let expected_slope = 1.0 - 0.5 * KappaRegime::of(lambda).exponent();
    let max_relative_gap = rows
        .iter()
        .map(|r| (r.hs_direct - r.hs_formula).abs() / r.hs_formula)
        .fold(0.0, f64::max);
    Ok(MEpsReport {
        rows,
        l1_on_ball: l1,
        eps_hs_slope,
        expected_slope,
        max_relative_gap,
    })
}
