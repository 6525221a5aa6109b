//! Hypothesis constants for complex potentials and the threshold
//! inequalities they enter.
//!
//! Pointwise certificates bound the quadratic-form constants from above
//! through the Hardy inequality. For radial `V` in `d = 3` the sharp form
//! constants are estimated as norms of weighted `H₀^{-1}` operators.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bs::assemble_weight_operator;
use crate::error::{invalid, unsupported, Result};
use crate::numerics::grid::RadialGrid;
use crate::numerics::quadrature::reference_rule;
use crate::numerics::roots::{find_root_increasing, golden_max};
use crate::potential::{Potential, PotentialKind};

/// `((d-2)/2)²`.
pub fn hardy_constant(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(invalid("dimension", "Hardy inequality needs d >= 3"));
    }
    let h = (d as f64 - 2.0) / 2.0;
    Ok(h * h)
}

/// A constant that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub divergent: bool,
}

impl Bound {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            divergent: false,
        }
    }

    pub fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            divergent: true,
        }
    }
}

const SCAN_LO: f64 = 1e-8;
const SCAN_HI: f64 = 1e8;
const SCAN_POINTS: usize = 8001;

/// `sup_{r>0} h(r)` by a logarithmic scan with golden-section refinement.
/// Growth towards `r → 0` or `r → ∞` reports `+∞`.
pub fn radial_sup(h: &dyn Fn(f64) -> f64, breakpoints: &[f64]) -> Bound {
    let grows = |a: f64, b: f64| {
        let (ha, hb) = (h(a), h(b));
        hb > 0.0 && hb > ha * (1.0 + 1e-6) + 1e-300
    };
    if grows(SCAN_HI / 10.0, SCAN_HI) || grows(SCAN_LO * 10.0, SCAN_LO) {
        return Bound::infinite();
    }
    let step = (SCAN_HI / SCAN_LO).ln() / (SCAN_POINTS - 1) as f64;
    let at = |k: usize| SCAN_LO * (step * k as f64).exp();
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..SCAN_POINTS {
        let v = h(at(k));
        if v > best_v {
            best_v = v;
            best = k;
        }
    }
    let lo = at(best.saturating_sub(1)).ln();
    let hi = at((best + 1).min(SCAN_POINTS - 1)).ln();
    let (_, refined) = golden_max(|t| h(t.exp()), lo, hi, 1e-12);
    let mut sup = best_v.max(refined);
    for &b in breakpoints {
        sup = sup.max(h(b * (1.0 - 1e-12))).max(h(b * (1.0 + 1e-12)));
    }
    if !sup.is_finite() {
        return Bound::infinite();
    }
    Bound::finite(sup.max(0.0))
}

fn breakpoints(v: &Potential) -> Vec<f64> {
    match v.kind {
        PotentialKind::SquareWell { r0, .. } => alloc::vec![r0],
        _ => Vec::new(),
    }
}

/// `sup |V| r² / ((d-2)/2)²`, an upper bound for the subordination constant.
pub fn subordination_a_pointwise(v: &Potential) -> Bound {
    let q = v.hardy_weight();
    radial_sup(&|r| v.abs(r) * r * r / q, &breakpoints(v))
}

/// Partial waves used for variational constants.
pub const VARIATIONAL_ELL_MAX: usize = 4;

/// `‖|V|^{1/2} H₀^{-1} |V|^{1/2}‖` on the grid (`d = 3`, radial `V`).
/// A lower estimate that increases under refinement.
pub fn subordination_a_variational(v: &Potential, grid: &RadialGrid) -> Result<f64> {
    variational_weight_norm(v, grid, &|r| v.abs(r))
}

fn variational_weight_norm(
    v: &Potential,
    grid: &RadialGrid,
    w: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<f64> {
    if v.dimension != 3 {
        return Err(unsupported(
            "subordination_a_variational",
            "requires dimension 3",
        ));
    }
    if !v.is_radial() {
        return Err(unsupported(
            "subordination_a_variational",
            "requires a radial potential",
        ));
    }
    Ok(assemble_weight_operator(w, grid, VARIATIONAL_ELL_MAX)?.norm)
}

/// Radius beyond which `|V|` is below double precision relevance.
pub fn integration_radius(v: &Potential) -> f64 {
    match v.kind {
        PotentialKind::Zero => 0.0,
        PotentialKind::SquareWell { r0, .. } => r0,
        PotentialKind::Gaussian { .. } => 9.0,
        PotentialKind::Yukawa { mu, .. } => 45.0 / mu,
        _ => f64::INFINITY,
    }
}

/// Geometric Gauss rule on `[0, r]` with breakpoints, resolving `r → 0`.
fn radial_rule(r_end: f64, breaks: &[f64], q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut edges = alloc::vec![0.0];
    let mut a = r_end * 1e-9;
    while a < r_end {
        edges.push(a);
        a *= 1.15;
    }
    edges.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < r_end));
    edges.push(r_end);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    crate::numerics::quadrature::composite_gauss(&edges, q)
}

/// `4π ∫_0^R r² f(r) dr` for a radial integrand on `ℝ³`.
fn ball_integral(f: &dyn Fn(f64) -> f64, r_end: f64, breaks: &[f64]) -> f64 {
    let (x, w) = radial_rule(r_end, breaks, 10);
    4.0 * PI
        * x.iter()
            .zip(&w)
            .map(|(r, wt)| wt * r * r * f(*r))
            .sum::<f64>()
}

fn require_d3(op: &'static str, v: &Potential) -> Result<()> {
    if v.dimension != 3 {
        return Err(unsupported(op, "requires dimension 3"));
    }
    Ok(())
}

/// `∫_{|x|<R} |V|`.
pub fn l1_on_ball(v: &Potential, radius: f64) -> Result<f64> {
    require_d3("l1_on_ball", v)?;
    if v.origin_singularity_order() >= 3.0 {
        return Ok(f64::INFINITY);
    }
    let end = radius.min(integration_radius(v));
    if end <= 0.0 {
        return Ok(0.0);
    }
    Ok(ball_integral(&|r| v.abs(r), end, &breakpoints(v)))
}

/// Rollnik norm `‖V‖_R = (∬ |V(x)||V(y)| |x−y|^{-2} dx dy)^{1/2}`.
///
/// For radial `V` the angular integrals give
/// `‖V‖_R² = 8π² ∬ r r' |V(r)||V(r')| ln((r+r')/|r−r'|) dr dr'`.
pub fn rollnik_norm(v: &Potential) -> Result<Bound> {
    require_d3("rollnik_norm", v)?;
    if v.is_zero() {
        return Ok(Bound::finite(0.0));
    }
    use crate::potential::Decay;
    let slow = matches!(v.decay(), Decay::Power(p) if p <= 2.0);
    if v.origin_singularity_order() >= 2.0 || slow {
        return Ok(Bound::infinite());
    }
    let r_end = integration_radius(v);
    let breaks = breakpoints(v);
    let (xo, wo) = radial_rule(r_end, &breaks, 10);
    let (t, tw) = reference_rule(20);
    let f = |r: f64| r * v.abs(r);
    // 2 ∫ dr f(r) ∫_0^r f(r') ln((r+r')/(r−r')) dr'
    let mut total = 0.0;
    for (r, wr) in xo.iter().zip(&wo) {
        let r = *r;
        let fr = f(r);
        if fr == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        // [0, r/2]: smooth kernel.
        for (s, ws) in t.iter().zip(&tw) {
            let y = 0.25 * r * (1.0 + s);
            inner += 0.25 * r * ws * f(y) * ((r + y) / (r - y)).ln();
        }
        // [r/2, r]: r' = r (1 − u⁴/2), u ∈ (0, 1].
        for (s, ws) in t.iter().zip(&tw) {
            let u = 0.5 * (1.0 + s);
            let u4 = u * u * u * u;
            let y = r * (1.0 - 0.5 * u4);
            let jac = 2.0 * r * u * u * u;
            inner += 0.5 * ws * jac * f(y) * ((2.0 - 0.5 * u4) / (0.5 * u4)).ln();
        }
        total += wr * fr * inner;
    }
    let value = (2.0 * 8.0 * PI * PI * total).sqrt();
    Ok(Bound::finite(value))
}

/// `3^{3/2}/(4π²)`.
pub fn frank_threshold() -> f64 {
    3.0.powf(1.5) / (4.0 * PI * PI)
}

/// `2^{4/3}/(3 π^{4/3})`.
pub fn sobolev_constant() -> f64 {
    2.0.powf(4.0 / 3.0) / (3.0 * PI.powf(4.0 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrankL32 {
    pub value: f64,
    pub passes: bool,
}

/// `∫|V|^{3/2}` and whether it is below `3^{3/2}/(4π²)`.
pub fn frank_l32(v: &Potential) -> Result<FrankL32> {
    require_d3("frank_l32", v)?;
    use crate::potential::Decay;
    let slow = matches!(v.decay(), Decay::Power(p) if p <= 2.0);
    if v.origin_singularity_order() >= 2.0 || slow {
        return Ok(FrankL32 {
            value: f64::INFINITY,
            passes: false,
        });
    }
    let end = integration_radius(v);
    let value = if end > 0.0 {
        ball_integral(&|r| v.abs(r).powf(1.5), end, &breakpoints(v))
    } else {
        0.0
    };
    Ok(FrankL32 {
        value,
        passes: value < frank_threshold(),
    })
}

/// `(∫|V|^{3/2})^{2/3} · 2^{4/3}/(3π^{4/3})`.
pub fn sobolev_chain_a(v: &Potential) -> Result<f64> {
    let l = frank_l32(v)?.value;
    Ok(l.powf(2.0 / 3.0) * sobolev_constant())
}

/// `Λ = sup r² |V| · 2/(d−2)`.
pub fn lambda_constant(v: &Potential) -> Bound {
    let c = 2.0 / (v.dimension as f64 - 2.0);
    radial_sup(&|r| v.abs(r) * r * r * c, &breakpoints(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub dimension: usize,
    /// `(d−2)/(5d−8)`.
    pub thm12_b_max: f64,
    pub thm12_b_max_num: u64,
    pub thm12_b_max_den: u64,
    pub lambda_star: f64,
    pub sqrt_b3_max: f64,
    pub b3_max: f64,
}

/// `2(2d−3)/(d−2) Λ + √(2/(d−2)) Λ^{3/2} − 1`.
pub fn lambda_star_equation(d: usize, l: f64) -> f64 {
    let df = d as f64;
    2.0 * (2.0 * df - 3.0) / (df - 2.0) * l + (2.0 / (df - 2.0)).sqrt() * l.powf(1.5) - 1.0
}

pub fn thresholds(d: usize) -> Result<Thresholds> {
    if d < 3 {
        return Err(invalid("dimension", "d >= 3 required"));
    }
    let df = d as f64;
    let num = d as u64 - 2;
    let den = 5 * d as u64 - 8;
    let lambda_star = find_root_increasing(|l| lambda_star_equation(d, l), 0.0, 1.0)?;
    let c = (2.0 / (df - 2.0)).powf(1.5);
    let sqrt_b3_max = 8.0 / (c + (c * c + 128.0).sqrt());
    Ok(Thresholds {
        dimension: d,
        thm12_b_max: num as f64 / den as f64,
        thm12_b_max_num: num,
        thm12_b_max_den: den,
        lambda_star,
        sqrt_b3_max,
        b3_max: sqrt_b3_max * sqrt_b3_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BConstants {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

/// Pointwise certificates for `b₁`, `b₂`, `b₃`. Divergent slots are `+∞`.
pub fn b_constants(v: &Potential) -> BConstants {
    let q = v.hardy_weight();
    let bp = breakpoints(v);
    let b1 = radial_sup(&|r| v.re_minus(r) * r * r / q, &bp).value.sqrt();
    let b2 = if v.d_r_r_re_jumps().iter().any(|(_, m)| *m > 0.0) {
        f64::INFINITY
    } else {
        radial_sup(&|r| v.d_r_r_re(r).max(0.0) * r * r / q, &bp)
            .value
            .sqrt()
    };
    let c = 2.0 / (v.dimension as f64 - 2.0);
    let b3 = radial_sup(&|r| v.im(r).abs() * r * r * c, &bp).value;
    BConstants { b1, b2, b3 }
}

/// Variational `b`'s as norms of weighted `H₀^{-1}` operators (`d = 3`).
pub fn b_constants_variational(v: &Potential, grid: &RadialGrid) -> Result<BConstants> {
    let b1 = variational_weight_norm(v, grid, &|r| v.re_minus(r))?.sqrt();
    let b2 = if v.d_r_r_re_jumps().iter().any(|(_, m)| *m > 0.0) {
        f64::INFINITY
    } else {
        variational_weight_norm(v, grid, &|r| v.d_r_r_re(r).max(0.0))?.sqrt()
    };
    let b3 = variational_weight_norm(v, grid, &|r| {
        let i = v.im(r);
        r * r * i * i
    })?
    .sqrt();
    Ok(BConstants { b1, b2, b3 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AMethod {
    PointwiseHardy,
    Variational,
}

/// JSON helpers writing `+∞` as `"inf"`.
pub mod ext_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr<'a> {
        Num(f64),
        Str(&'a str),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str("inf") => Ok(f64::INFINITY),
            Repr::Str(other) => Err(serde::de::Error::custom(alloc::format!(
                "expected number or \"inf\", got {other}"
            ))),
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

/// All hypothesis constants with verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub potential: String,
    pub dimension: usize,
    #[serde(with = "ext_f64")]
    pub a: f64,
    pub a_method: AMethod,
    #[serde(with = "ext_f64")]
    pub a_pointwise: f64,
    #[serde(with = "ext_f64::option", default)]
    pub a_variational: Option<f64>,
    #[serde(with = "ext_f64::option", default)]
    pub rollnik: Option<f64>,
    #[serde(with = "ext_f64::option", default)]
    pub frank_l32: Option<f64>,
    #[serde(with = "ext_f64::option", default)]
    pub sobolev_chain_a: Option<f64>,
    #[serde(rename = "Λ", with = "ext_f64")]
    pub lambda: f64,
    #[serde(with = "ext_f64")]
    pub b1: f64,
    #[serde(with = "ext_f64")]
    pub b2: f64,
    #[serde(with = "ext_f64")]
    pub b3: f64,
    pub verdicts: BTreeMap<String, Verdict>,
    pub flags: Vec<String>,
}

/// Verdicts for the four theorem hypotheses.
pub fn evaluate_theorems(report: &ConditionReport, d: usize) -> Result<BTreeMap<String, Verdict>> {
    let t = thresholds(d)?;
    let mut out = BTreeMap::new();
    let fin = |x: f64| x.is_finite();

    let thm11 = if d != 3 || !fin(report.a) {
        Verdict::Fail
    } else if report.a < 1.0 {
        Verdict::Pass
    } else if report.a_method == AMethod::Variational {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    out.insert("thm11".to_string(), thm11);

    let thm12 = if fin(report.lambda) && report.lambda < t.thm12_b_max {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    out.insert("thm12".to_string(), thm12);

    let (b1, b2, b3) = (report.b1, report.b2, report.b3);
    let c = (2.0 / (d as f64 - 2.0)).powf(1.5);
    let thm13 = if fin(b1) && fin(b2) && fin(b3) {
        let first = b1 * b1 < 1.0 - 2.0 * b3 / (d as f64 - 2.0);
        let second = b2 * b2 + 2.0 * b3 + 0.25 * b3.sqrt() * c < 1.0;
        if first && second {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::Fail
    };
    out.insert("thm13".to_string(), thm13);

    let thm51 = if fin(report.lambda) && report.lambda < t.lambda_star {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    out.insert("thm51".to_string(), thm51);
    Ok(out)
}

/// Computes every constant. `grid` enables the `d = 3` variational values.
pub fn check_conditions(v: &Potential, grid: Option<&RadialGrid>) -> Result<ConditionReport> {
    let d = v.dimension;
    hardy_constant(d)?;
    let mut flags = Vec::new();
    let ap = subordination_a_pointwise(v);
    if ap.divergent {
        flags.push("a_pointwise_divergent".to_string());
    }
    let a_variational = match grid {
        Some(g) if d == 3 && v.is_radial() && !ap.divergent => {
            Some(subordination_a_variational(v, g)?)
        }
        _ => None,
    };
    let (a, a_method) = match a_variational {
        Some(x) => (x, AMethod::Variational),
        None => (ap.value, AMethod::PointwiseHardy),
    };
    let (rollnik, frank, sob) = if d == 3 {
        let r = rollnik_norm(v)?;
        if r.divergent {
            flags.push("rollnik_divergent".to_string());
        }
        let f = frank_l32(v)?;
        if f.value.is_infinite() {
            flags.push("frank_l32_divergent".to_string());
        }
        (Some(r.value), Some(f.value), Some(sobolev_chain_a(v)?))
    } else {
        (None, None, None)
    };
    let lam = lambda_constant(v);
    if lam.divergent {
        flags.push("lambda_divergent".to_string());
    }
    let b = b_constants(v);
    for (name, val) in [("b1", b.b1), ("b2", b.b2), ("b3", b.b3)] {
        if val.is_infinite() {
            flags.push(alloc::format!("{name}_divergent"));
        }
    }
    let mut report = ConditionReport {
        potential: v.name().to_string(),
        dimension: d,
        a,
        a_method,
        a_pointwise: ap.value,
        a_variational,
        rollnik,
        frank_l32: frank,
        sobolev_chain_a: sob,
        lambda: lam.value,
        b1: b.b1,
        b2: b.b2,
        b3: b.b3,
        verdicts: BTreeMap::new(),
        flags,
    };
    report.verdicts = evaluate_theorems(&report, d)?;
    Ok(report)
}
