//! Multiplier identities for `f = Δu + λu` with radial weights `G(x) = g(|x|)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::jet::Jet;
use super::profile::{Family, Profile, TestFunction};
use super::quad::{integrate, integrate_checked, Point, Quadrature};
use crate::error::{invalid, precondition, Result};
use crate::C64;

/// Named term of an identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value_re: f64,
    pub value_im: f64,
}

impl Term {
    pub fn new(name: &str, v: C64) -> Self {
        Self {
            name: name.to_string(),
            value_re: v.re,
            value_im: v.im,
        }
    }

    pub fn value(&self) -> C64 {
        C64::new(self.value_re, self.value_im)
    }
}

/// Both sides of an identity, its terms and the relative residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: String,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub terms: Vec<Term>,
    pub lhs: f64,
    pub rhs: f64,
    /// `∫|u|²`
    pub norm_sq: f64,
    pub residual: f64,
}

/// `|LHS − RHS| / (|LHS| + |RHS| + ‖u‖²)`, zero when everything vanishes.
pub fn relative_residual(lhs: f64, rhs: f64, norm_sq: f64) -> f64 {
    let den = lhs.abs() + rhs.abs() + norm_sq;
    if den == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / den
    }
}

/// `sgn(λ₂)` with `sgn 0 = 1`.
pub fn sgn(lambda: C64) -> f64 {
    if lambda.im < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn report(
    id: &str,
    lambda: C64,
    terms: Vec<Term>,
    lhs: f64,
    rhs: f64,
    norm_sq: f64,
) -> IdentityReport {
    IdentityReport {
        identity_id: id.to_string(),
        lambda_re: lambda.re,
        lambda_im: lambda.im,
        terms,
        lhs,
        rhs,
        norm_sq,
        residual: relative_residual(lhs, rhs, norm_sq),
    }
}

/// Derivative data of a radial weight at `r`.
#[derive(Debug, Clone, Copy)]
pub struct RadialWeight {
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    /// `ΔG`
    pub lap: f64,
    /// `Δ²G`
    pub bilap: f64,
}

pub fn radial_weight(p: &Profile, d: usize, r: f64) -> RadialWeight {
    let j = p.jet(r);
    let j1 = j.differentiate();
    let j2 = j1.differentiate();
    let c = C64::new(d as f64 - 1.0, 0.0);
    let lap = j2 + (j1 * Jet::variable(r).recip()).scale(c);
    let l1 = lap.differentiate();
    let l2 = l1.differentiate();
    RadialWeight {
        g: j.value().re,
        g1: j1.value().re,
        g2: j2.value().re,
        lap: lap.value().re,
        bilap: (l2.value() + l1.value() * ((d as f64 - 1.0) / r)).re,
    }
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

fn run<const K: usize>(
    checked: bool,
    op: &'static str,
    u: &TestFunction,
    quad: Quadrature,
    f: &dyn Fn(&Point) -> [C64; K],
) -> Result<[C64; K]> {
    if checked {
        integrate_checked(op, u, quad, degree(u), &[], f)
    } else {
        integrate(u, quad, degree(u), &[], f)
    }
}

/// `f = Δu + λu` at a point.
fn forcing(p: &Point, lambda: C64) -> C64 {
    p.s.lap + lambda * p.s.u
}

/// `λ₁∫G₁|u|² − ∫G₁|∇u|² + ½∫ΔG₁|u|² = Re∫f G₁ ū`.
pub fn identity_residual_1(
    u: &TestFunction,
    lambda: C64,
    g1: &Profile,
    quad: Quadrature,
) -> Result<IdentityReport> {
    identity_1(u, lambda, g1, quad, true)
}

/// [`identity_residual_1`] at one quadrature level, without the refinement check.
pub fn identity_1_single_level(
    u: &TestFunction,
    lambda: C64,
    g1: &Profile,
    quad: Quadrature,
) -> Result<IdentityReport> {
    identity_1(u, lambda, g1, quad, false)
}

fn identity_1(
    u: &TestFunction,
    lambda: C64,
    g1: &Profile,
    quad: Quadrature,
    checked: bool,
) -> Result<IdentityReport> {
    let d = u.dimension;
    let [m, a, b, c, rhs] = run(checked, "identity 1", u, quad, &|p: &Point| {
        let w = radial_weight(g1, d, p.r);
        let uu = p.s.u.norm_sqr();
        let f = forcing(p, lambda);
        [
            C64::new(uu, 0.0),
            C64::new(w.g * uu, 0.0),
            C64::new(w.g * norm2(&p.s.grad), 0.0),
            C64::new(w.lap * uu, 0.0),
            f * w.g * p.s.u.conj(),
        ]
    })?;
    let t1 = a * lambda.re;
    let t3 = c * 0.5;
    let lhs = t1.re - b.re + t3.re;
    let terms = alloc::vec![
        Term::new("lambda1*int(G|u|^2)", t1),
        Term::new("-int(G|grad u|^2)", -b),
        Term::new("1/2*int(lap G|u|^2)", t3),
        Term::new("re int(f G conj u)", C64::new(rhs.re, 0.0)),
    ];
    Ok(report("id1", lambda, terms, lhs, rhs.re, m.re))
}

/// `λ₂∫G₂|u|² − Im∫∇G₂·ū∇u = Im∫f G₂ ū`.
pub fn identity_residual_2(
    u: &TestFunction,
    lambda: C64,
    g2: &Profile,
    quad: Quadrature,
) -> Result<IdentityReport> {
    identity_2(u, lambda, g2, quad, true)
}

/// [`identity_residual_2`] at one quadrature level, without the refinement check.
pub fn identity_2_single_level(
    u: &TestFunction,
    lambda: C64,
    g2: &Profile,
    quad: Quadrature,
) -> Result<IdentityReport> {
    identity_2(u, lambda, g2, quad, false)
}

fn identity_2(
    u: &TestFunction,
    lambda: C64,
    g2: &Profile,
    quad: Quadrature,
    checked: bool,
) -> Result<IdentityReport> {
    let d = u.dimension;
    let [m, a, b, rhs] = run(checked, "identity 2", u, quad, &|p: &Point| {
        let w = radial_weight(g2, d, p.r);
        let uu = p.s.u.norm_sqr();
        let f = forcing(p, lambda);
        [
            C64::new(uu, 0.0),
            C64::new(w.g * uu, 0.0),
            p.s.u.conj() * p.s.dr * w.g1,
            f * w.g * p.s.u.conj(),
        ]
    })?;
    let t1 = a * lambda.im;
    let lhs = t1.re - b.im;
    let terms = alloc::vec![
        Term::new("lambda2*int(G|u|^2)", t1),
        Term::new("-im int(grad G . conj u grad u)", C64::new(-b.im, 0.0)),
        Term::new("im int(f G conj u)", C64::new(rhs.im, 0.0)),
    ];
    Ok(report("id2", lambda, terms, lhs, rhs.im, m.re))
}

/// `∫∇u·∇²G₃·∇ū − ¼∫Δ²G₃|u|² + λ₂Im∫∇G₃·u∇ū = −½Re∫fΔG₃ū − Re∫f∇G₃·∇ū`.
pub fn identity_residual_3(
    u: &TestFunction,
    lambda: C64,
    g3: &Profile,
    quad: Quadrature,
) -> Result<IdentityReport> {
    identity_3(u, lambda, g3, quad, true)
}

/// [`identity_residual_3`] at one quadrature level, without the refinement check.
pub fn identity_3_single_level(
    u: &TestFunction,
    lambda: C64,
    g3: &Profile,
    quad: Quadrature,
) -> Result<IdentityReport> {
    identity_3(u, lambda, g3, quad, false)
}

fn identity_3(
    u: &TestFunction,
    lambda: C64,
    g3: &Profile,
    quad: Quadrature,
    checked: bool,
) -> Result<IdentityReport> {
    let d = u.dimension;
    let [m, hess, bil, cross, r1, r2] = run(checked, "identity 3", u, quad, &|p: &Point| {
        let w = radial_weight(g3, d, p.r);
        let uu = p.s.u.norm_sqr();
        let dr2 = p.s.dr.norm_sqr();
        let f = forcing(p, lambda);
        let hq = w.g2 * dr2 + w.g1 / p.r * (norm2(&p.s.grad) - dr2);
        [
            C64::new(uu, 0.0),
            C64::new(hq, 0.0),
            C64::new(w.bilap * uu, 0.0),
            p.s.u * p.s.dr.conj() * w.g1,
            f * w.lap * p.s.u.conj(),
            f * w.g1 * p.s.dr.conj(),
        ]
    })?;
    let t2 = -0.25 * bil.re;
    let t3 = lambda.im * cross.im;
    let s1 = -0.5 * r1.re;
    let s2 = -r2.re;
    let terms = alloc::vec![
        Term::new("int(grad u . hess G . grad conj u)", hess),
        Term::new("-1/4*int(bilap G|u|^2)", C64::new(t2, 0.0)),
        Term::new("lambda2*im int(grad G . u grad conj u)", C64::new(t3, 0.0)),
        Term::new("-1/2*re int(f lap G conj u)", C64::new(s1, 0.0)),
        Term::new("-re int(f grad G . grad conj u)", C64::new(s2, 0.0)),
    ];
    Ok(report(
        "id3",
        lambda,
        terms,
        hess.re + t2 + t3,
        s1 + s2,
        m.re,
    ))
}

/// Radial multiplier profiles `g₁, g₂, g₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTriple {
    pub g1: Profile,
    pub g2: Profile,
    pub g3: Profile,
    pub canonical: bool,
}

impl MultiplierTriple {
    /// `g₃ = r²`, `g₁ = g₃''/2 = 1`, `g₂ = sgn(λ₂) g₃' = ±2r`.
    pub fn canonical(lambda: C64) -> Self {
        Self {
            g1: Profile::Constant { c: 1.0 },
            g2: Profile::Power {
                c: 2.0 * sgn(lambda),
                p: 1.0,
            },
            g3: Profile::Power { c: 1.0, p: 2.0 },
            canonical: true,
        }
    }

    /// `(g₃'' − 2g₁, g₃'' − g₃'/r, g₂ − sgn(λ₂)g₃')` at `r`; all vanish for
    /// the canonical triple. The middle entry is the difference of the
    /// coefficients `½g₃''` of `|∂_r u|²` and `g₃'/r − ½g₃''` of `|∇_τ u|²`.
    pub fn cancellations(&self, lambda: C64, d: usize, r: f64) -> [f64; 3] {
        let w1 = radial_weight(&self.g1, d, r);
        let w2 = radial_weight(&self.g2, d, r);
        let w3 = radial_weight(&self.g3, d, r);
        [
            w3.g2 - 2.0 * w1.g,
            w3.g2 - w3.g1 / r,
            w2.g - sgn(lambda) * w3.g1,
        ]
    }
}

/// Sum `id1 + λ₁^{1/2} id2 + id3` for a triple. For the canonical triple the
/// sum is also compared with its closed form in `|∇u|²`, `|u|²` and `x·∇ū`.
pub fn triple_identity(
    u: &TestFunction,
    lambda: C64,
    t: &MultiplierTriple,
    quad: Quadrature,
) -> Result<IdentityReport> {
    if !(lambda.re > 0.0) {
        return Err(precondition("triple identity", "needs Re lambda > 0"));
    }
    let a = lambda.re.sqrt();
    let r1 = identity_residual_1(u, lambda, &t.g1, quad)?;
    let r2 = identity_residual_2(u, lambda, &t.g2, quad)?;
    let r3 = identity_residual_3(u, lambda, &t.g3, quad)?;
    let lhs = r1.lhs + a * r2.lhs + r3.lhs;
    let rhs = r1.rhs + a * r2.rhs + r3.rhs;
    let mut terms = alloc::vec![
        Term::new("id1 lhs", C64::new(r1.lhs, 0.0)),
        Term::new("sqrt(lambda1)*id2 lhs", C64::new(a * r2.lhs, 0.0)),
        Term::new("id3 lhs", C64::new(r3.lhs, 0.0)),
        Term::new("id1 rhs", C64::new(r1.rhs, 0.0)),
        Term::new("sqrt(lambda1)*id2 rhs", C64::new(a * r2.rhs, 0.0)),
        Term::new("id3 rhs", C64::new(r3.rhs, 0.0)),
    ];
    let mut residual = relative_residual(lhs, rhs, r1.norm_sq);
    if t.canonical {
        let s = sgn(lambda);
        let d = u.dimension as f64;
        let l2 = lambda.im;
        let [g, uu, c1, ru, c2, fu, fru, fx] =
            integrate_checked("canonical closed form", u, quad, degree(u), &[], &|p| {
                let f = forcing(p, lambda);
                let uu = p.s.u.norm_sqr();
                [
                    C64::new(norm2(&p.s.grad), 0.0),
                    C64::new(uu, 0.0),
                    p.s.u.conj() * p.s.dr,
                    C64::new(p.r * uu, 0.0),
                    p.s.u * p.s.dr.conj() * p.r,
                    f * p.s.u.conj(),
                    f * p.s.u.conj() * p.r,
                    f * p.s.dr.conj() * p.r,
                ]
            })?;
        let closed_lhs = g.re + lambda.re * uu.re - 2.0 * s * a * c1.im
            + 2.0 * l2.abs() * a * ru.re
            + 2.0 * l2 * c2.im;
        let closed_rhs = (1.0 - d) * fu.re + 2.0 * a * s * fru.im - 2.0 * fx.re;
        terms.push(Term::new("closed form lhs", C64::new(closed_lhs, 0.0)));
        terms.push(Term::new("closed form rhs", C64::new(closed_rhs, 0.0)));
        residual = residual
            .max(relative_residual(closed_lhs, closed_rhs, uu.re))
            .max(relative_residual(lhs, closed_lhs, uu.re));
    }
    let mut rep = report("triple", lambda, terms, lhs, rhs, r1.norm_sq);
    rep.residual = residual;
    Ok(rep)
}

/// Phase `e^{±i sgn(λ₂) λ₁^{1/2} r}` of the gauge transform.
pub fn gauge_phase(lambda: C64, plus: bool, r: f64) -> Result<C64> {
    if !(lambda.re > 0.0) {
        return Err(precondition("gauge transform", "needs Re lambda > 0"));
    }
    let pm = if plus { 1.0 } else { -1.0 };
    Ok(C64::new(0.0, pm * sgn(lambda) * lambda.re.sqrt() * r).exp())
}

/// Value and gradient of `u^±` at `x`.
pub fn gauge_transform(
    u: &TestFunction,
    lambda: C64,
    plus: bool,
    x: &[f64],
) -> Result<(C64, Vec<C64>)> {
    if x.len() != u.dimension {
        return Err(crate::Error::DimensionMismatch {
            expected: u.dimension,
            found: x.len(),
        });
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(invalid(
            "x",
            "the gauge phase is not differentiable at the origin",
        ));
    }
    let ph = gauge_phase(lambda, plus, r)?;
    let s = u.sample(x, r);
    let k = C64::new(
        0.0,
        if plus { 1.0 } else { -1.0 } * sgn(lambda) * lambda.re.sqrt(),
    );
    let grad = s
        .grad
        .iter()
        .zip(x)
        .map(|(g, xi)| ph * (g + k * (xi / r) * s.u))
        .collect();
    Ok((ph * s.u, grad))
}

/// `∇u⁻ = e^{−iσ√λ₁ r}(∇u − iσ√λ₁ (x/r) u)` and `∂_r u⁻` from a sample.
fn minus_gradient(p: &Point, lambda: C64) -> (Vec<C64>, C64) {
    let a = lambda.re.sqrt();
    let ph = C64::new(0.0, -sgn(lambda) * a * p.r).exp();
    let k = C64::new(0.0, -sgn(lambda) * a);
    let grad =
        p.s.grad
            .iter()
            .zip(p.x)
            .map(|(g, xi)| ph * (g + k * (xi / p.r) * p.s.u))
            .collect();
    (grad, ph * (p.s.dr + k * p.s.u))
}

/// Key identity:
/// `∫|∇u⁻|² + (|λ₂|/√λ₁)∫|x||∇u⁻|² − ((d−1)/2)(|λ₂|/√λ₁)∫|u|²/|x| = I₁ + I₂ + I₃`
/// with `I₁ = (1−d)Re∫fū`, `I₂ = −2Re∫|x| f (∂_r ū + iσ√λ₁ ū)`,
/// `I₃ = −(|λ₂|/√λ₁)Re∫|x| f ū` and `σ = sgn(λ₂)`. In gauged variables the
/// integrand of `I₂` is `|x| f⁻ conj(∂_r u⁻)` with `f⁻ = e^{−iσ√λ₁|x|} f`.
pub fn key_identity_residual(
    u: &TestFunction,
    lambda: C64,
    quad: Quadrature,
) -> Result<IdentityReport> {
    key_identity(u, lambda, quad, true)
}

/// [`key_identity_residual`] at one quadrature level, without the refinement check.
pub fn key_identity_single_level(
    u: &TestFunction,
    lambda: C64,
    quad: Quadrature,
) -> Result<IdentityReport> {
    key_identity(u, lambda, quad, false)
}

fn key_identity(
    u: &TestFunction,
    lambda: C64,
    quad: Quadrature,
    checked: bool,
) -> Result<IdentityReport> {
    if !(lambda.re > 0.0) {
        return Err(precondition("key identity", "needs Re lambda > 0"));
    }
    let d = u.dimension as f64;
    let a = lambda.re.sqrt();
    let c = lambda.im.abs() / a;
    let [m, g, gr, ur, fu, f2, fr] = run(checked, "key identity", u, quad, &|p: &Point| {
        let (gm, drm) = minus_gradient(p, lambda);
        let uu = p.s.u.norm_sqr();
        let f = forcing(p, lambda);
        // ∂_r ū + iσ√λ₁ ū = e^{−iσ√λ₁ r} conj(∂_r u⁻)
        let comb = p.s.dr.conj() + C64::new(0.0, sgn(lambda) * a) * p.s.u.conj();
        debug_assert!(
            (comb - C64::new(0.0, -sgn(lambda) * a * p.r).exp() * drm.conj()).norm()
                <= 1e-9 * (1.0 + comb.norm())
        );
        let gg = norm2(&gm);
        [
            C64::new(uu, 0.0),
            C64::new(gg, 0.0),
            C64::new(p.r * gg, 0.0),
            C64::new(uu / p.r, 0.0),
            f * p.s.u.conj(),
            f * comb * p.r,
            f * p.s.u.conj() * p.r,
        ]
    })?;
    let l2 = c * gr.re;
    let l3 = -(d - 1.0) / 2.0 * c * ur.re;
    let i1 = (1.0 - d) * fu.re;
    let i2 = -2.0 * f2.re;
    let i3 = -c * fr.re;
    let terms = alloc::vec![
        Term::new("int|grad u-|^2", g),
        Term::new(
            "|lambda2|/sqrt(lambda1)*int|x||grad u-|^2",
            C64::new(l2, 0.0)
        ),
        Term::new(
            "-(d-1)/2*|lambda2|/sqrt(lambda1)*int|u|^2/|x|",
            C64::new(l3, 0.0)
        ),
        Term::new("I1", C64::new(i1, 0.0)),
        Term::new("I2", C64::new(i2, 0.0)),
        Term::new("I3", C64::new(i3, 0.0)),
    ];
    Ok(report(
        "key",
        lambda,
        terms,
        g.re + l2 + l3,
        i1 + i2 + i3,
        m.re,
    ))
}

/// `|∇u⁻|² − (|∇u|² + λ₁|u|² − 2σ√λ₁ Im(ū∂_r u))` at `x`.
pub fn gauge_gradient_expansion_defect(u: &TestFunction, lambda: C64, x: &[f64]) -> Result<f64> {
    let (_, gm) = gauge_transform(u, lambda, false, x)?;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let s = u.sample(x, r);
    let rhs = norm2(&s.grad) + lambda.re * s.u.norm_sqr()
        - 2.0 * sgn(lambda) * lambda.re.sqrt() * (s.u.conj() * s.dr).im;
    Ok(norm2(&gm) - rhs)
}

/// `∫|u^±|²/|x|^s` for `s ∈ {0, 1, 2}` together with `∫|u|²/|x|^s`.
pub fn gauge_moduli(
    u: &TestFunction,
    lambda: C64,
    plus: bool,
    quad: Quadrature,
) -> Result<[(f64, f64); 3]> {
    gauge_phase(lambda, plus, 1.0)?;
    let v = integrate(u, quad, degree(u), &[], &|p: &Point| {
        let g = (gauge_phase(lambda, plus, p.r).unwrap_or(C64::new(1.0, 0.0)) * p.s.u).norm_sqr();
        let uu = p.s.u.norm_sqr();
        [
            C64::new(g, uu),
            C64::new(g / p.r, uu / p.r),
            C64::new(g / (p.r * p.r), uu / (p.r * p.r)),
        ]
    })?;
    Ok([(v[0].re, v[0].im), (v[1].re, v[1].im), (v[2].re, v[2].im)])
}

/// Hardy and weighted Hardy quotients with their sharp bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyRatios {
    /// `∫|ψ|²/|x|² / ∫|∇ψ|²`
    pub hardy: f64,
    /// `4/(d−2)²`
    pub hardy_bound: f64,
    /// `∫|ψ|²/|x| / ∫|x||∇ψ|²`
    pub weighted: f64,
    /// `4/(d−1)²`
    pub weighted_bound: f64,
}

impl HardyRatios {
    pub fn holds(&self) -> bool {
        self.hardy <= self.hardy_bound && self.weighted <= self.weighted_bound
    }
}

pub fn hardy_check(psi: &TestFunction, quad: Quadrature) -> Result<HardyRatios> {
    if psi.is_zero() {
        return Err(invalid("psi", "the zero function has no Hardy quotient"));
    }
    let d = psi.dimension as f64;
    let [a, b, c, e] =
        integrate_checked("hardy check", psi, quad, degree(psi), &[], &|p: &Point| {
            let uu = p.s.u.norm_sqr();
            let gg = norm2(&p.s.grad);
            [
                C64::new(uu / (p.r * p.r), 0.0),
                C64::new(gg, 0.0),
                C64::new(uu / p.r, 0.0),
                C64::new(p.r * gg, 0.0),
            ]
        })?;
    Ok(HardyRatios {
        hardy: a.re / b.re,
        hardy_bound: 4.0 / ((d - 2.0) * (d - 2.0)),
        weighted: c.re / e.re,
        weighted_bound: 4.0 / ((d - 1.0) * (d - 1.0)),
    })
}
