//! Integration of pointwise quadratic forms in `u` over `ℝ^d`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::profile::{Family, Sample, TestFunction};
use crate::error::{invalid, unsupported, Error, Result};
use crate::numerics::quadrature::{composite_gauss, reference_rule};
use crate::numerics::BoxGrid;
use crate::C64;

/// Largest refinement difference tolerated before reporting non-convergence.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Integration path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "path", rename_all = "kebab-case")]
pub enum Quadrature {
    /// Composite Gauss in `r` (after `r = ρ s^k`), exact angular rule.
    Radial { panels: usize, q: usize },
    /// Tensor Gauss on `[−ρ, ρ]^d` with `n` points per axis.
    Box { n: usize },
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::Radial { panels: 24, q: 10 }
    }
}

impl Quadrature {
    pub fn refined(&self) -> Self {
        match *self {
            Quadrature::Radial { panels, q } => Quadrature::Radial {
                panels: 2 * panels,
                q,
            },
            Quadrature::Box { n } => Quadrature::Box { n: 2 * n },
        }
    }
}

/// Point handed to an integrand.
pub struct Point<'a> {
    pub x: &'a [f64],
    pub r: f64,
    pub s: &'a Sample,
}

/// Surface area of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    // |S^{d−1}| = 2π^{d/2}/Γ(d/2), with Γ at integers and half-integers by recursion.
    let half = d as f64 / 2.0;
    let mut gamma = if d % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut t = if d % 2 == 0 { 1.0 } else { 0.5 };
    while t < half {
        gamma *= t;
        t += 1.0;
    }
    2.0 * PI.powf(half) / gamma
}

/// Unit directions and weights (summing to `|S^{d−1}|`).
fn angular_rule(d: usize, family: Family, degree: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let area = sphere_area(d);
    if family == Family::Radial && degree == 0 {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        return Ok(vec![(e, area)]);
    }
    if degree <= 3 {
        // ±e_i: exact through degree 3.
        let mut out = Vec::with_capacity(2 * d);
        for i in 0..d {
            for sgn in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = sgn;
                out.push((e, area / (2 * d) as f64));
            }
        }
        return Ok(out);
    }
    if d != 3 {
        return Err(unsupported(
            "angular rule",
            "degree > 3 only available for d = 3",
        ));
    }
    // Gauss in cos θ times the trapezoid rule in φ: exact through degree 2n−1.
    let n = degree / 2 + 1;
    let (ct, wt) = reference_rule(n);
    let nphi = degree + 1;
    let mut out = Vec::with_capacity(n * nphi);
    for (c, w) in ct.iter().zip(&wt) {
        let st = (1.0 - c * c).sqrt();
        for k in 0..nphi {
            let phi = 2.0 * PI * k as f64 / nphi as f64;
            out.push((
                vec![st * phi.cos(), st * phi.sin(), *c],
                w * 2.0 * PI / nphi as f64,
            ));
        }
    }
    Ok(out)
}

/// `∫_{ℝ^d} F(x) dx` for a vector of integrands. `degree` is the angular
/// polynomial degree of the integrand (0 for radial integrands of radial `u`).
/// `breaks` are extra radii where the integrand has kinks or point masses.
pub fn integrate<const K: usize>(
    u: &TestFunction,
    quad: Quadrature,
    degree: usize,
    breaks: &[f64],
    f: &dyn Fn(&Point) -> [C64; K],
) -> Result<[C64; K]> {
    let d = u.dimension;
    let zero = C64::new(0.0, 0.0);
    let mut acc = [zero; K];
    match quad {
        Quadrature::Radial { panels, q } => {
            if panels == 0 || q == 0 {
                return Err(invalid("quadrature", "panels and q must be positive"));
            }
            let rho = u.support;
            let k = u.substitution_power();
            // Panel edges in s; breakpoints mapped back through s = (r/ρ)^{1/k}.
            let mut edges: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
            for b in breaks {
                if *b > 0.0 && *b < rho {
                    edges.push((b / rho).powf(1.0 / k));
                }
            }
            edges.sort_by(|a, b| a.total_cmp(b));
            edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            let (sn, sw) = composite_gauss(&edges, q);
            let dirs = angular_rule(d, u.family, degree)?;
            let mut x = vec![0.0; d];
            for (s, w) in sn.iter().zip(&sw) {
                let r = rho * s.powf(k);
                let jac = rho * k * s.powf(k - 1.0) * r.powi(d as i32 - 1);
                for (e, we) in &dirs {
                    for i in 0..d {
                        x[i] = r * e[i];
                    }
                    let sample = u.sample(&x, r);
                    let v = f(&Point {
                        x: &x,
                        r,
                        s: &sample,
                    });
                    let wt = w * jac * we;
                    for i in 0..K {
                        acc[i] += v[i] * wt;
                    }
                }
            }
        }
        Quadrature::Box { n } => {
            if u.family != Family::Ell1 {
                return Err(unsupported(
                    "box quadrature",
                    "cross-check path is for the ell = 1 family",
                ));
            }
            let grid = BoxGrid::new(d, n, u.support)?;
            let mut x = vec![0.0; d];
            for idx in 0..grid.cardinality() {
                let w = grid.point(idx, &mut x);
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r >= u.support || r == 0.0 {
                    continue;
                }
                let sample = u.sample(&x, r);
                let v = f(&Point {
                    x: &x,
                    r,
                    s: &sample,
                });
                for i in 0..K {
                    acc[i] += v[i] * w;
                }
            }
        }
    }
    Ok(acc)
}

/// `∫_{|x| = r} F dσ` for a single sphere, used for point masses in `r`.
pub fn sphere_integral<const K: usize>(
    u: &TestFunction,
    r: f64,
    degree: usize,
    f: &dyn Fn(&Point) -> [C64; K],
) -> Result<[C64; K]> {
    let d = u.dimension;
    let mut acc = [C64::new(0.0, 0.0); K];
    if r <= 0.0 || r >= u.support {
        return Ok(acc);
    }
    let mut x = vec![0.0; d];
    let area = r.powi(d as i32 - 1);
    for (e, we) in angular_rule(d, u.family, degree)? {
        for i in 0..d {
            x[i] = r * e[i];
        }
        let sample = u.sample(&x, r);
        let v = f(&Point {
            x: &x,
            r,
            s: &sample,
        });
        for i in 0..K {
            acc[i] += v[i] * (we * area);
        }
    }
    Ok(acc)
}

/// Integrate at `quad` and at its refinement; error if they differ by more
/// than [`CONVERGENCE_TOL`] relative to the largest integral.
pub fn integrate_checked<const K: usize>(
    op: &'static str,
    u: &TestFunction,
    quad: Quadrature,
    degree: usize,
    breaks: &[f64],
    f: &dyn Fn(&Point) -> [C64; K],
) -> Result<[C64; K]> {
    let a = integrate(u, quad, degree, breaks, f)?;
    let b = integrate(u, quad.refined(), degree, breaks, f)?;
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let diff = a
        .iter()
        .zip(&b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    if !(diff.is_finite() && scale.is_finite()) {
        return Err(Error::QuadratureNotConverged {
            op,
            diff: f64::INFINITY,
        });
    }
    if scale > 0.0 && diff > CONVERGENCE_TOL * scale {
        return Err(Error::QuadratureNotConverged {
            op,
            diff: diff / scale,
        });
    }
    Ok(b)
}
