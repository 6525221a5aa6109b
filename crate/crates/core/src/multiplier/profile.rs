//! Radial profiles and the analytic test functions built from them.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{invalid, Result};
use crate::C64;

/// Radial profile `g(r)` evaluated as a jet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Constant {
        c: f64,
    },
    /// `c r^p`
    Power {
        c: f64,
        p: f64,
    },
    /// `(1 − r²/ρ²)^m e^{q r²}` for `r < ρ`, zero beyond.
    Bump {
        rho: f64,
        m: u32,
        q_re: f64,
        q_im: f64,
    },
    /// `r² e^{−a r²}`
    WindowedQuadratic {
        a: f64,
    },
    /// `(r/ρ)^{s}(1 − (r/ρ)^{2ε})` for `r < ρ` with `s = −(d−2)/2 + ε`.
    HardyExtremal {
        rho: f64,
        s: f64,
        eps: f64,
    },
}

impl Profile {
    pub fn jet(&self, r: f64) -> Jet {
        let x = Jet::variable(r);
        let re = |v: f64| C64::new(v, 0.0);
        match *self {
            Profile::Constant { c } => Jet::constant(re(c)),
            Profile::Power { c, p } => {
                if p == 0.0 {
                    Jet::constant(re(c))
                } else if p.fract() == 0.0 && p > 0.0 {
                    x.powi(p as u32).scale(re(c))
                } else {
                    x.powf(p).scale(re(c))
                }
            }
            Profile::Bump { rho, m, q_re, q_im } => {
                if r >= rho {
                    return Jet::zero();
                }
                let x2 = x * x;
                let base = Jet::constant(re(1.0)) - x2.scale(re(1.0 / (rho * rho)));
                base.powi(m) * x2.scale(C64::new(q_re, q_im)).exp()
            }
            Profile::WindowedQuadratic { a } => {
                let x2 = x * x;
                x2 * x2.scale(re(-a)).exp()
            }
            Profile::HardyExtremal { rho, s, eps } => {
                if r >= rho {
                    return Jet::zero();
                }
                let t = x.scale(re(1.0 / rho));
                t.powf(s) * (Jet::constant(re(1.0)) - t.powf(2.0 * eps))
            }
        }
    }

    /// Value and the first two derivatives.
    pub fn d012(&self, r: f64) -> [C64; 3] {
        let j = self.jet(r);
        [j.derivative(0), j.derivative(1), j.derivative(2)]
    }
}

/// Shape of a test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `u = h(|x|)`
    Radial,
    /// `u = x₁ h(|x|)`
    Ell1,
}

/// Pointwise data of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub u: C64,
    pub grad: Vec<C64>,
    pub lap: C64,
    /// `∂_r u = (x/r)·∇u`
    pub dr: C64,
}

/// Compactly supported analytic test function on `ℝ^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub family: Family,
    pub profile: Profile,
    pub support: f64,
    pub dimension: usize,
    pub amplitude: C64,
}

impl TestFunction {
    /// `u = (1 − r²/ρ²)^m e^{q r²}`. Complex `q` gives a genuinely complex `u`.
    pub fn radial_bump(dimension: usize, rho: f64, m: u32, q: C64) -> Result<Self> {
        Self::bump(Family::Radial, dimension, rho, m, q)
    }

    /// `u = x₁ (1 − r²/ρ²)^m e^{q r²}`.
    pub fn ell1_bump(dimension: usize, rho: f64, m: u32, q: C64) -> Result<Self> {
        Self::bump(Family::Ell1, dimension, rho, m, q)
    }

    fn bump(family: Family, dimension: usize, rho: f64, m: u32, q: C64) -> Result<Self> {
        check_dimension(dimension)?;
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid("rho", "support radius must be positive"));
        }
        if m < 3 {
            return Err(invalid(
                "m",
                "need m >= 3 for two continuous derivatives and a square-integrable Hessian",
            ));
        }
        let profile = Profile::Bump {
            rho,
            m,
            q_re: q.re,
            q_im: q.im,
        };
        Ok(Self {
            family,
            profile,
            support: rho,
            dimension,
            amplitude: C64::new(1.0, 0.0),
        })
    }

    /// `ψ_ε = r^{−(d−2)/2+ε}(1 − r^{2ε})` on the unit ball.
    pub fn near_extremal(dimension: usize, eps: f64) -> Result<Self> {
        check_dimension(dimension)?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid("eps", "need 0 < eps < 1"));
        }
        let s = -(dimension as f64 - 2.0) / 2.0 + eps;
        Ok(Self {
            family: Family::Radial,
            profile: Profile::HardyExtremal { rho: 1.0, s, eps },
            support: 1.0,
            dimension,
            amplitude: C64::new(1.0, 0.0),
        })
    }

    pub fn with_amplitude(mut self, a: C64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == C64::new(0.0, 0.0)
    }

    /// Exponent `k` of the substitution `r = ρ s^k` that makes the radial
    /// integrands smooth in `s`.
    pub fn substitution_power(&self) -> f64 {
        match self.profile {
            Profile::HardyExtremal { eps, .. } => 1.0 / (2.0 * eps),
            _ => 1.0,
        }
    }

    /// Value, gradient, Laplacian and radial derivative at `x`, `|x| = r > 0`.
    pub fn sample(&self, x: &[f64], r: f64) -> Sample {
        let d = self.dimension;
        let a = self.amplitude;
        let [h, h1, h2] = self.profile.d012(r);
        let mut grad = vec![C64::new(0.0, 0.0); d];
        match self.family {
            Family::Radial => {
                for (g, xi) in grad.iter_mut().zip(x) {
                    *g = a * h1 * (xi / r);
                }
                let lap = a * (h2 + h1 * ((d as f64 - 1.0) / r));
                Sample {
                    u: a * h,
                    grad,
                    lap,
                    dr: a * h1,
                }
            }
            Family::Ell1 => {
                let x1 = x[0];
                for (g, xi) in grad.iter_mut().zip(x) {
                    *g = a * h1 * (x1 * xi / r);
                }
                grad[0] += a * h;
                let lap = a * x1 * (h2 + h1 * ((d as f64 + 1.0) / r));
                let dr = a * x1 * (h / r + h1);
                Sample {
                    u: a * x1 * h,
                    grad,
                    lap,
                    dr,
                }
            }
        }
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if d < 3 {
        Err(invalid("dimension", "d >= 3 required"))
    } else {
        Ok(())
    }
}
