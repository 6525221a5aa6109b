//! Estimates for eigen-like probes `f = Vu`: the two cases `|λ₂| > λ₁`
//! and `|λ₂| ≤ λ₁`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::identities::{relative_residual, sgn, Term};
use super::profile::{Family, TestFunction};
use super::quad::{integrate_checked, sphere_integral, Point, Quadrature};
use crate::conditions::{b_constants, lambda_constant, BConstants};
use crate::error::{precondition, Result};
use crate::potential::Potential;
use crate::C64;

/// Outcome of a probe check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeVerdict {
    Pass,
    /// Holds only because nothing non-trivial can be tested.
    VacuousPass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSplitRow {
    /// `+1` or `−1`
    pub sign: f64,
    /// `(λ₁ ± λ₂)∫|u|²`
    pub lhs: f64,
    /// `∫|∇u|² + Re∫fū ± Im∫fū` with `f = Δu + λu` (an identity)
    pub identity_rhs: f64,
    /// `∫|∇u|² + Re∫Vuū ± Im∫Vuū`
    pub chain: f64,
    /// `(1 − 4Λ/(d−2))∫|∇u|²`
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSplitReport {
    pub lambda_constant: f64,
    /// `1 − 4Λ/(d−2)`
    pub coefficient: f64,
    pub rows: Vec<CaseSplitRow>,
    pub identity_residual: f64,
    pub verdict: ProbeVerdict,
}

fn degree(u: &TestFunction) -> usize {
    match u.family {
        Family::Radial => 0,
        Family::Ell1 => 2,
    }
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Case `|λ₂| > λ₁`: `(λ₁ ± λ₂)∫|u|² = ∫|∇u|² + Re∫fū ± Im∫fū`, and with
/// `f = Vu` the right side is at least `(1 − 4Λ/(d−2))∫|∇u|²`.
pub fn case_split_bound(
    u: &TestFunction,
    lambda: C64,
    v: &Potential,
    quad: Quadrature,
) -> Result<CaseSplitReport> {
    if !(lambda.im.abs() > lambda.re) {
        return Err(precondition("case split", "needs |Im lambda| > Re lambda"));
    }
    let d = u.dimension as f64;
    let lam = lambda_constant(v);
    let coefficient = if lam.divergent {
        f64::NEG_INFINITY
    } else {
        1.0 - 4.0 * lam.value / (d - 2.0)
    };
    let [uu, gg, fu, vu] =
        integrate_checked("case split", u, quad, degree(u), &[], &|p: &Point| {
            let f = p.s.lap + lambda * p.s.u;
            let vv = v.radial(p.r);
            [
                C64::new(p.s.u.norm_sqr(), 0.0),
                C64::new(norm2(&p.s.grad), 0.0),
                f * p.s.u.conj(),
                vv * p.s.u.norm_sqr(),
            ]
        })?;
    let mut rows = Vec::new();
    let mut residual = 0.0f64;
    for sign in [1.0, -1.0] {
        let lhs = (lambda.re + sign * lambda.im) * uu.re;
        let identity_rhs = gg.re + fu.re + sign * fu.im;
        let chain = gg.re + vu.re + sign * vu.im;
        let bound = coefficient * gg.re;
        residual = residual.max(relative_residual(lhs, identity_rhs, uu.re));
        rows.push(CaseSplitRow {
            sign,
            lhs,
            identity_rhs,
            chain,
            bound,
            holds: chain >= bound,
        });
    }
    let verdict = if v.is_zero() || u.is_zero() {
        ProbeVerdict::VacuousPass
    } else if lam.divergent || coefficient <= 0.0 {
        ProbeVerdict::Inconclusive
    } else if rows.iter().all(|r| r.holds) {
        ProbeVerdict::Pass
    } else {
        ProbeVerdict::Fail
    };
    Ok(CaseSplitReport {
        lambda_constant: lam.value,
        coefficient,
        rows,
        identity_residual: residual,
        verdict,
    })
}

/// One inequality of the estimate chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// The inequality reads `lhs ≤ rhs`.
    pub holds: bool,
    /// False when a hypothesis of the step (finite constants, `b₁ ≤ 1`,
    /// `|λ₂| ≤ λ₁`) is not met; such a step is reported but not asserted.
    pub applicable: bool,
}

fn check(name: &str, lhs: f64, rhs: f64, applicable: bool) -> ChainCheck {
    let tol = 1e-10 * (lhs.abs() + rhs.abs());
    ChainCheck {
        name: name.to_string(),
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
        applicable,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiReport {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub b: BConstants,
    pub terms: Vec<Term>,
    /// `I`
    pub lhs: f64,
    /// `I₁ + I₂ + I_g`
    pub rhs: f64,
    pub residual: f64,
    pub chain: Vec<ChainCheck>,
}

impl RadiReport {
    pub fn chain_holds(&self) -> bool {
        self.chain.iter().all(|c| c.holds || !c.applicable)
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.value_re)
    }
}

/// Key identity specialised to `f = Vu + g`, `g = Δu + λu − Vu`:
///
/// `I = ∫|∇u⁻|² + c∫|x||∇u⁻|² − ((d−1)/2)c∫|u|²/|x| + c∫|x|V₁|u|²`,
/// `c = |λ₂|/√λ₁`, equals `I₁ + I₂ + I_g` with `I₁ = ∫|u|² ∂_r(|x|V₁)`,
/// `I₂ = 2Im∫|x|V₂u(∂_rū + iσ√λ₁ū)` and `I_g` the key-identity right side
/// evaluated at `g`. `I_g` vanishes for a true eigenfunction.
pub fn radi_identity_terms(
    u: &TestFunction,
    lambda: C64,
    v: &Potential,
    quad: Quadrature,
) -> Result<RadiReport> {
    if !(lambda.re > 0.0) {
        return Err(precondition(
            "radial-derivative identity",
            "needs Re lambda > 0",
        ));
    }
    let d = u.dimension as f64;
    let a = lambda.re.sqrt();
    let c = lambda.im.abs() / a;
    let sg = sgn(lambda);
    let jumps = v.d_r_r_re_jumps();
    let breaks: Vec<f64> = jumps.iter().map(|j| j.0).collect();
    let deg = degree(u);
    let integrand = |p: &Point| {
        let uu = p.s.u.norm_sqr();
        let ph = C64::new(0.0, -sg * a * p.r).exp();
        let k = C64::new(0.0, -sg * a);
        let gm: f64 =
            p.s.grad
                .iter()
                .zip(p.x)
                .map(|(g, xi)| (ph * (g + k * (xi / p.r) * p.s.u)).norm_sqr())
                .sum();
        let vv = v.radial(p.r);
        let comb = p.s.dr.conj() + C64::new(0.0, sg * a) * p.s.u.conj();
        let g = p.s.lap + lambda * p.s.u - vv * p.s.u;
        let ig =
            g * p.s.u.conj() * (1.0 - d) - g * comb * (2.0 * p.r) - g * p.s.u.conj() * (c * p.r);
        [
            C64::new(uu, 0.0),
            C64::new(gm, 0.0),
            C64::new(p.r * gm, 0.0),
            C64::new(uu / p.r, 0.0),
            C64::new(p.r * vv.re * uu, 0.0),
            C64::new(uu * v.d_r_r_re(p.r), 0.0),
            p.s.u * comb * (p.r * vv.im),
            C64::new(ig.re, (g * p.s.u.conj()).im),
        ]
    };
    let [uu, dm, wm, ux, xv, i1, i2c, igc] = integrate_checked(
        "radial-derivative identity",
        u,
        quad,
        deg,
        &breaks,
        &integrand,
    )?;
    let mut i1 = i1.re;
    for (r0, mass) in &jumps {
        let [s] = sphere_integral(u, *r0, deg, &|p: &Point| [C64::new(p.s.u.norm_sqr(), 0.0)])?;
        i1 += mass * s.re;
    }
    let i2 = 2.0 * i2c.im;
    let ig = igc.re;
    let eps2 = igc.im.abs();
    let t_w = c * wm.re;
    let t_u = -(d - 1.0) / 2.0 * c * ux.re;
    let t_v = c * xv.re;
    let lhs = dm.re + t_w + t_u + t_v;
    let rhs = i1 + i2 + ig;
    let terms = alloc::vec![
        Term::new("int|grad u-|^2", dm),
        Term::new("c*int|x||grad u-|^2", C64::new(t_w, 0.0)),
        Term::new("-(d-1)/2*c*int|u|^2/|x|", C64::new(t_u, 0.0)),
        Term::new("c*int|x|V1|u|^2", C64::new(t_v, 0.0)),
        Term::new("I", C64::new(lhs, 0.0)),
        Term::new("I1", C64::new(i1, 0.0)),
        Term::new("I2", C64::new(i2, 0.0)),
        Term::new("I_defect", C64::new(ig, 0.0)),
        Term::new("eps^2", C64::new(eps2, 0.0)),
    ];

    let b = b_constants(v);
    let dd = dm.re;
    let cd = 2.0 / (d - 2.0);
    let fin = |x: f64| x.is_finite();
    let mut chain = Vec::new();
    chain.push(check("I1 <= b2^2 D", i1, b.b2 * b.b2 * dd, fin(b.b2)));
    chain.push(check(
        "|I2| <= 2 b3 D",
        i2.abs(),
        2.0 * b.b3 * dd,
        fin(b.b3),
    ));
    chain.push(check(
        "|lambda2| int|u|^2 <= b3 c_d D + eps^2",
        lambda.im.abs() * uu.re,
        b.b3 * cd * dd + eps2,
        fin(b.b3),
    ));
    chain.push(check(
        "D - 1/4 c int|u|^2/|x| <= I",
        dd - 0.25 * c * ux.re,
        lhs,
        fin(b.b1) && b.b1 <= 1.0,
    ));
    let low = (1.0 - 0.25 * b.b3.sqrt() * cd.powf(1.5)) * dd - 0.25 * cd * dd.sqrt() * eps2.sqrt();
    chain.push(check(
        "[1 - 1/4 sqrt(b3) c_d^(3/2)] D - correction <= I",
        low,
        lhs,
        fin(b.b1) && b.b1 <= 1.0 && fin(b.b3) && lambda.im.abs() <= lambda.re,
    ));
    Ok(RadiReport {
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        b,
        terms,
        lhs,
        rhs,
        residual: relative_residual(lhs, rhs, uu.re),
        chain,
    })
}
