//! Smoke checks for the magnetic operator `−Δ_A + V`, `∇_A = ∇ + iA`.

use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::identities::{relative_residual, sgn, Term};
use super::profile::TestFunction;
use super::quad::{integrate_checked, Point, Quadrature};
use crate::error::{invalid, precondition, unsupported, Result};
use crate::potential::{b_tau, MagneticPotential, Potential};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagneticReport {
    /// `max |B_τ·x|` over the samples
    pub max_b_tau_dot_x: f64,
    /// `max |B_τ·∇_A u|` over the samples
    pub max_b_tau_grad: f64,
    /// `max |B_τ·∇_A u − B_τ·(∇_A u − iσ√λ₁ (x/|x|) u)|`
    pub max_tangential_defect: f64,
    pub terms: Vec<Term>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `∇_A u` at a point.
fn grad_a(p: &Point, a: &[f64]) -> Vec<C64> {
    p.s.grad
        .iter()
        .zip(a)
        .map(|(g, ai)| g + C64::new(0.0, *ai) * p.s.u)
        .collect()
}

/// Tangentiality of `B_τ` at the samples and the identity
/// `λ₁∫|u|² − ∫|∇_A u|² − Re∫V|u|² = Re∫gū`, `g = Δ_A u + λu − Vu`.
pub fn magnetic_identity_smoke(
    u: &TestFunction,
    lambda: C64,
    v: &Potential,
    mag: &MagneticPotential,
    samples: &[Vec<f64>],
    quad: Quadrature,
) -> Result<MagneticReport> {
    let d = u.dimension;
    if d != 3 || mag.dimension != 3 {
        return Err(unsupported("magnetic smoke", "d = 3 only"));
    }
    if !(lambda.re > 0.0) {
        return Err(precondition("magnetic smoke", "needs Re lambda > 0"));
    }
    let alpha = sgn(lambda) * lambda.re.sqrt();
    let (mut m_dot, mut m_grad, mut m_def) = (0.0f64, 0.0f64, 0.0f64);
    for x in samples {
        if x.len() != d {
            return Err(crate::Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if !(r > 0.0) {
            return Err(invalid("samples", "A is not differentiable at the origin"));
        }
        let bt = b_tau(mag, x)?;
        let s = u.sample(x, r);
        let a = mag.a(x);
        let ga: Vec<C64> = s
            .grad
            .iter()
            .zip(&a)
            .map(|(g, ai)| g + C64::new(0.0, *ai) * s.u)
            .collect();
        let dot: f64 = bt.iter().zip(x).map(|(b, xi)| b * xi).sum();
        let t1: C64 = bt.iter().zip(&ga).map(|(b, g)| g * *b).sum();
        let t2: C64 = bt
            .iter()
            .zip(ga.iter().zip(x))
            .map(|(b, (g, xi))| (g - C64::new(0.0, alpha * xi / r) * s.u) * *b)
            .sum();
        m_dot = m_dot.max(dot.abs());
        m_grad = m_grad.max(t1.norm());
        m_def = m_def.max((t1 - t2).norm());
    }

    let [uu, ga2, vu, gu] =
        integrate_checked("magnetic identity", u, quad, 4, &[], &|p: &Point| {
            let a = mag.a(p.x);
            let ga = grad_a(p, &a);
            let a2: f64 = a.iter().map(|t| t * t).sum();
            let adotgrad: C64 = a.iter().zip(&p.s.grad).map(|(ai, g)| g * *ai).sum();
            let lap_a = p.s.lap
                + C64::new(0.0, 2.0) * adotgrad
                + C64::new(0.0, mag.divergence(p.x)) * p.s.u
                - p.s.u * a2;
            let vv = v.radial(p.r);
            let g = lap_a + lambda * p.s.u - vv * p.s.u;
            let uu = p.s.u.norm_sqr();
            [
                C64::new(uu, 0.0),
                C64::new(ga.iter().map(|z| z.norm_sqr()).sum(), 0.0),
                vv * uu,
                g * p.s.u.conj(),
            ]
        })?;
    let t1 = lambda.re * uu.re;
    let lhs = t1 - ga2.re - vu.re;
    let terms = alloc::vec![
        Term::new("lambda1*int|u|^2", C64::new(t1, 0.0)),
        Term::new("-int|grad_A u|^2", C64::new(-ga2.re, 0.0)),
        Term::new("-re int(V|u|^2)", C64::new(-vu.re, 0.0)),
        Term::new("re int(g conj u)", C64::new(gu.re, 0.0)),
    ];
    Ok(MagneticReport {
        max_b_tau_dot_x: m_dot,
        max_b_tau_grad: m_grad,
        max_tangential_defect: m_def,
        terms,
        lhs,
        rhs: gu.re,
        residual: relative_residual(lhs, gu.re, uu.re),
    })
}
