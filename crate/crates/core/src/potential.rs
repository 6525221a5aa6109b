//! Closed-form complex potentials and magnetic vector potentials.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::C64;

/// The catalog entries. All are radial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    /// `V = -a ((d-2)/2)^2 / r^2`
    Hardy {
        a: f64,
    },
    /// `V = c / r`
    CoulombRepulsive {
        c: f64,
    },
    /// `V = i β / r^2`
    ImaginaryHardy {
        beta: f64,
    },
    /// `V = (-V₀ + i c_im) e^{-r^2}`
    Gaussian {
        v0: f64,
        c_im: f64,
    },
    /// `V = -g e^{-μ r} / r`
    Yukawa {
        g: f64,
        mu: f64,
    },
    /// `V = -V₀` for `r < R₀`, else 0.
    SquareWell {
        v0: f64,
        r0: f64,
    },
}

/// Far-field behaviour of `|V|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// `V = 0` beyond the given radius.
    Compact(f64),
    /// Faster than any power.
    Exponential,
    /// `|V| ~ r^{-p}`.
    Power(f64),
}

/// A closed-form potential on `ℝ^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub kind: PotentialKind,
    pub dimension: usize,
}

pub const CATALOG_NAMES: [&str; 7] = [
    "zero",
    "hardy",
    "coulomb_repulsive",
    "imaginary_hardy",
    "gaussian",
    "yukawa",
    "square_well",
];

fn param(params: &BTreeMap<String, f64>, keys: &[&'static str]) -> Option<f64> {
    keys.iter().find_map(|k| params.get(*k).copied())
}

fn required(params: &BTreeMap<String, f64>, keys: &[&'static str]) -> Result<f64> {
    let v = param(params, keys).ok_or_else(|| invalid(keys[0], "missing potential parameter"))?;
    if !v.is_finite() {
        return Err(invalid(keys[0], "must be finite"));
    }
    Ok(v)
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be positive, got {v}")))
    }
}

/// Look up a catalog potential by name and parameter map.
pub fn catalog(name: &str, params: &BTreeMap<String, f64>, dimension: usize) -> Result<Potential> {
    let kind = match name {
        "zero" => PotentialKind::Zero,
        "hardy" => PotentialKind::Hardy {
            a: positive("a", required(params, &["a"])?)?,
        },
        "coulomb_repulsive" => PotentialKind::CoulombRepulsive {
            c: positive("c", required(params, &["c"])?)?,
        },
        "imaginary_hardy" => PotentialKind::ImaginaryHardy {
            beta: required(params, &["beta", "β"])?,
        },
        "gaussian" => {
            let v0 = required(params, &["v0", "V0", "V₀"])?;
            if v0 < 0.0 {
                return Err(invalid("v0", "must be non-negative"));
            }
            let c_im = param(params, &["c_im"]).unwrap_or(0.0);
            if !c_im.is_finite() {
                return Err(invalid("c_im", "must be finite"));
            }
            PotentialKind::Gaussian { v0, c_im }
        }
        "yukawa" => PotentialKind::Yukawa {
            g: positive("g", required(params, &["g"])?)?,
            mu: positive("mu", required(params, &["mu", "μ"])?)?,
        },
        "square_well" => PotentialKind::SquareWell {
            v0: positive("v0", required(params, &["v0", "V0", "V₀"])?)?,
            r0: positive("r0", required(params, &["r0", "R0", "R₀"])?)?,
        },
        other => return Err(Error::UnknownPotential(other.to_string())),
    };
    Potential::new(kind, dimension)
}

impl Potential {
    pub fn new(kind: PotentialKind, dimension: usize) -> Result<Self> {
        if dimension < 3 {
            return Err(invalid("dimension", "d >= 3 required"));
        }
        Ok(Self { kind, dimension })
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            kind: PotentialKind::Zero,
            dimension,
        }
    }

    pub fn hardy(a: f64, dimension: usize) -> Self {
        Self {
            kind: PotentialKind::Hardy { a },
            dimension,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PotentialKind::Zero => "zero",
            PotentialKind::Hardy { .. } => "hardy",
            PotentialKind::CoulombRepulsive { .. } => "coulomb_repulsive",
            PotentialKind::ImaginaryHardy { .. } => "imaginary_hardy",
            PotentialKind::Gaussian { .. } => "gaussian",
            PotentialKind::Yukawa { .. } => "yukawa",
            PotentialKind::SquareWell { .. } => "square_well",
        }
    }

    /// Parameter map in the catalog's naming.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), v);
        };
        match self.kind {
            PotentialKind::Zero => {}
            PotentialKind::Hardy { a } => put("a", a),
            PotentialKind::CoulombRepulsive { c } => put("c", c),
            PotentialKind::ImaginaryHardy { beta } => put("beta", beta),
            PotentialKind::Gaussian { v0, c_im } => {
                put("v0", v0);
                put("c_im", c_im);
            }
            PotentialKind::Yukawa { g, mu } => {
                put("g", g);
                put("mu", mu);
            }
            PotentialKind::SquareWell { v0, r0 } => {
                put("v0", v0);
                put("r0", r0);
            }
        }
        m
    }

    pub fn is_radial(&self) -> bool {
        true
    }

    /// `((d-2)/2)^2`.
    pub fn hardy_weight(&self) -> f64 {
        let h = (self.dimension as f64 - 2.0) / 2.0;
        h * h
    }

    /// `s` with `|V| = O(r^{-s})` at the origin.
    pub fn origin_singularity_order(&self) -> f64 {
        match self.kind {
            PotentialKind::Hardy { .. } | PotentialKind::ImaginaryHardy { .. } => 2.0,
            PotentialKind::CoulombRepulsive { .. } | PotentialKind::Yukawa { .. } => 1.0,
            PotentialKind::Zero
            | PotentialKind::Gaussian { .. }
            | PotentialKind::SquareWell { .. } => 0.0,
        }
    }

    pub fn decay(&self) -> Decay {
        match self.kind {
            PotentialKind::Zero => Decay::Compact(0.0),
            PotentialKind::Hardy { .. } | PotentialKind::ImaginaryHardy { .. } => Decay::Power(2.0),
            PotentialKind::CoulombRepulsive { .. } => Decay::Power(1.0),
            PotentialKind::Gaussian { .. } | PotentialKind::Yukawa { .. } => Decay::Exponential,
            PotentialKind::SquareWell { r0, .. } => Decay::Compact(r0),
        }
    }

    /// True when `V` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self.kind {
            PotentialKind::Zero => true,
            PotentialKind::Gaussian { v0, c_im } => v0 == 0.0 && c_im == 0.0,
            PotentialKind::ImaginaryHardy { beta } => beta == 0.0,
            _ => false,
        }
    }

    /// Radial profile `V(r)`, `r > 0`.
    pub fn radial(&self, r: f64) -> C64 {
        let q = self.hardy_weight();
        match self.kind {
            PotentialKind::Zero => C64::new(0.0, 0.0),
            PotentialKind::Hardy { a } => C64::new(-a * q / (r * r), 0.0),
            PotentialKind::CoulombRepulsive { c } => C64::new(c / r, 0.0),
            PotentialKind::ImaginaryHardy { beta } => C64::new(0.0, beta / (r * r)),
            PotentialKind::Gaussian { v0, c_im } => C64::new(-v0, c_im) * (-r * r).exp(),
            PotentialKind::Yukawa { g, mu } => C64::new(-g * (-mu * r).exp() / r, 0.0),
            PotentialKind::SquareWell { v0, r0 } => {
                if r < r0 {
                    C64::new(-v0, 0.0)
                } else if r == r0 {
                    C64::new(-0.5 * v0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// `V(x)` for a point of `ℝ^d`.
    pub fn eval(&self, x: &[f64]) -> C64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.radial(r)
    }

    pub fn abs(&self, r: f64) -> f64 {
        self.radial(r).norm()
    }

    pub fn re_plus(&self, r: f64) -> f64 {
        self.radial(r).re.max(0.0)
    }

    pub fn re_minus(&self, r: f64) -> f64 {
        (-self.radial(r).re).max(0.0)
    }

    pub fn im(&self, r: f64) -> f64 {
        self.radial(r).im
    }

    /// `|V|^{1/2} sgn V` with `sgn 0 = 0`.
    pub fn v_half(&self, r: f64) -> C64 {
        v_half(self.radial(r))
    }

    /// Regular part of `∂_r(r Re V)`.
    pub fn d_r_r_re(&self, r: f64) -> f64 {
        let q = self.hardy_weight();
        match self.kind {
            PotentialKind::Zero
            | PotentialKind::CoulombRepulsive { .. }
            | PotentialKind::ImaginaryHardy { .. } => 0.0,
            PotentialKind::Hardy { a } => a * q / (r * r),
            PotentialKind::Gaussian { v0, .. } => -v0 * (-r * r).exp() * (1.0 - 2.0 * r * r),
            PotentialKind::Yukawa { g, mu } => g * mu * (-mu * r).exp(),
            PotentialKind::SquareWell { v0, r0 } => {
                if r < r0 {
                    -v0
                } else {
                    0.0
                }
            }
        }
    }

    /// Point masses `(radius, mass)` of `∂_r(r Re V)` (jumps of `r Re V`).
    pub fn d_r_r_re_jumps(&self) -> Vec<(f64, f64)> {
        match self.kind {
            PotentialKind::SquareWell { v0, r0 } => vec![(r0, v0 * r0)],
            _ => Vec::new(),
        }
    }

    /// `t V` for `t > 0`.
    pub fn scaled(&self, t: f64) -> Self {
        let kind = match self.kind {
            PotentialKind::Zero => PotentialKind::Zero,
            PotentialKind::Hardy { a } => PotentialKind::Hardy { a: t * a },
            PotentialKind::CoulombRepulsive { c } => PotentialKind::CoulombRepulsive { c: t * c },
            PotentialKind::ImaginaryHardy { beta } => {
                PotentialKind::ImaginaryHardy { beta: t * beta }
            }
            PotentialKind::Gaussian { v0, c_im } => PotentialKind::Gaussian {
                v0: t * v0,
                c_im: t * c_im,
            },
            PotentialKind::Yukawa { g, mu } => PotentialKind::Yukawa { g: t * g, mu },
            PotentialKind::SquareWell { v0, r0 } => PotentialKind::SquareWell { v0: t * v0, r0 },
        };
        Self {
            kind,
            dimension: self.dimension,
        }
    }

    /// Complex conjugate potential.
    pub fn conjugate(&self) -> Self {
        let kind = match self.kind {
            PotentialKind::ImaginaryHardy { beta } => PotentialKind::ImaginaryHardy { beta: -beta },
            PotentialKind::Gaussian { v0, c_im } => PotentialKind::Gaussian { v0, c_im: -c_im },
            k => k,
        };
        Self {
            kind,
            dimension: self.dimension,
        }
    }
}

/// `|v|^{1/2} sgn v` with `sgn 0 = 0`.
pub fn v_half(v: C64) -> C64 {
    let m = v.norm();
    if m == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        v / m.sqrt()
    }
}

/// Complex signum `v/|v|`, `sgn 0 = 0`.
pub fn csgn(v: C64) -> C64 {
    let m = v.norm();
    if m == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        v / m
    }
}

/// Magnetic vector potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MagneticKind {
    Zero,
    /// `A = (s/2)(-x₂, x₁, 0, …)`.
    Uniform {
        strength: f64,
    },
    /// `A = s |x|^{-2} (-x₂, x₁, 0, …)`, whose field has no tangential part.
    InverseSquareSwirl {
        strength: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticPotential {
    pub kind: MagneticKind,
    pub dimension: usize,
}

impl MagneticPotential {
    pub fn new(kind: MagneticKind, dimension: usize) -> Result<Self> {
        if dimension < 3 {
            return Err(invalid("dimension", "d >= 3 required"));
        }
        Ok(Self { kind, dimension })
    }

    pub fn analytic_b(&self) -> bool {
        true
    }

    pub fn a(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dimension;
        let mut out = vec![0.0; d];
        match self.kind {
            MagneticKind::Zero => {}
            MagneticKind::Uniform { strength } => {
                out[0] = -0.5 * strength * x[1];
                out[1] = 0.5 * strength * x[0];
            }
            MagneticKind::InverseSquareSwirl { strength } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                out[0] = -strength * x[1] / r2;
                out[1] = strength * x[0] / r2;
            }
        }
        out
    }

    /// `J[i][j] = ∂_i A_j`, row-major `d×d`.
    pub fn jacobian(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dimension;
        let mut j = vec![0.0; d * d];
        match self.kind {
            MagneticKind::Zero => {}
            MagneticKind::Uniform { strength } => {
                j[d] = -0.5 * strength; // ∂_2 A_1
                j[1] = 0.5 * strength; // ∂_1 A_2
            }
            MagneticKind::InverseSquareSwirl { strength } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let r4 = r2 * r2;
                for i in 0..d {
                    let d2 = if i == 1 { 1.0 } else { 0.0 };
                    let d1 = if i == 0 { 1.0 } else { 0.0 };
                    j[i * d] = strength * (-d2 / r2 + 2.0 * x[1] * x[i] / r4);
                    j[i * d + 1] = strength * (d1 / r2 - 2.0 * x[0] * x[i] / r4);
                }
            }
        }
        j
    }

    pub fn divergence(&self, x: &[f64]) -> f64 {
        let d = self.dimension;
        let j = self.jacobian(x);
        (0..d).map(|i| j[i * d + i]).sum()
    }

    /// `B = ∇A − (∇A)ᵗ` from the analytic Jacobian.
    pub fn b(&self, x: &[f64]) -> Vec<f64> {
        antisym(self.dimension, &self.jacobian(x))
    }

    /// `B` from centered differences of `A` with step `h`.
    pub fn b_finite_difference(&self, x: &[f64], h: f64) -> Vec<f64> {
        let d = self.dimension;
        let mut j = vec![0.0; d * d];
        let mut xp = x.to_vec();
        for i in 0..d {
            xp[i] = x[i] + h;
            let ap = self.a(&xp);
            xp[i] = x[i] - h;
            let am = self.a(&xp);
            xp[i] = x[i];
            for k in 0..d {
                j[i * d + k] = (ap[k] - am[k]) / (2.0 * h);
            }
        }
        antisym(d, &j)
    }
}

fn antisym(d: usize, j: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            b[i * d + k] = j[i * d + k] - j[k * d + i];
        }
    }
    b
}

/// `B_τ(x) = (x/|x|) · B(x)` (row vector times matrix), from a given `B`.
pub fn tangential_trace(d: usize, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(invalid("x", "B_tau is undefined at the origin"));
    }
    let mut out = vec![0.0; d];
    for k in 0..d {
        out[k] = (0..d).map(|i| x[i] / r * b[i * d + k]).sum();
    }
    Ok(out)
}

/// `B_τ` from the analytic field.
pub fn b_tau(mag: &MagneticPotential, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != mag.dimension {
        return Err(Error::DimensionMismatch {
            expected: mag.dimension,
            found: x.len(),
        });
    }
    tangential_trace(mag.dimension, x, &mag.b(x))
}

/// `B_τ` from the finite-difference field.
pub fn b_tau_finite_difference(mag: &MagneticPotential, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if x.len() != mag.dimension {
        return Err(Error::DimensionMismatch {
            expected: mag.dimension,
            found: x.len(),
        });
    }
    tangential_trace(mag.dimension, x, &mag.b_finite_difference(x, h))
}
