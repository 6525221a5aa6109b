//! Truncated Taylor jets for forward-mode derivatives of radial profiles.

use core::ops::{Add, Mul, Neg, Sub};
use num_traits::Float;

use crate::C64;

/// Number of stored coefficients; derivatives up to order `ORDER - 1`.
pub const ORDER: usize = 5;

/// `f(r₀ + t) = Σ c[k] t^k + O(t^ORDER)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [C64; ORDER],
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

impl Jet {
    pub fn constant(v: C64) -> Self {
        let mut c = [ZERO; ORDER];
        c[0] = v;
        Self { c }
    }

    /// The identity function at `r₀`.
    pub fn variable(r0: f64) -> Self {
        let mut c = [ZERO; ORDER];
        c[0] = C64::new(r0, 0.0);
        c[1] = C64::new(1.0, 0.0);
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: [ZERO; ORDER] }
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    /// `k`-th derivative at `r₀`.
    pub fn derivative(&self, k: usize) -> C64 {
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        self.c[k] * f
    }

    /// Jet of `f'` (the top coefficient is lost and set to zero).
    pub fn differentiate(&self) -> Self {
        let mut c = [ZERO; ORDER];
        for k in 0..ORDER - 1 {
            c[k] = self.c[k + 1] * (k + 1) as f64;
        }
        Self { c }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v *= s;
        }
        Self { c }
    }

    /// Compose with `φ(x)` given `φ^{(k)}(c₀)/k!` for `k < ORDER`.
    fn compose(&self, taylor: [C64; ORDER]) -> Self {
        let mut d = *self;
        d.c[0] = ZERO;
        let mut out = Jet::constant(taylor[0]);
        let mut p = Jet::constant(C64::new(1.0, 0.0));
        for t in taylor.iter().skip(1) {
            p = p * d;
            out = out + p.scale(*t);
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        let mut t = [ZERO; ORDER];
        let mut f = 1.0;
        for (k, v) in t.iter_mut().enumerate() {
            if k > 0 {
                f *= k as f64;
            }
            *v = e / f;
        }
        self.compose(t)
    }

    pub fn ln(&self) -> Self {
        let a = self.c[0];
        let mut t = [ZERO; ORDER];
        t[0] = a.ln();
        let inv = C64::new(1.0, 0.0) / a;
        let mut p = inv;
        for (k, v) in t.iter_mut().enumerate().skip(1) {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *v = p * (sign / k as f64);
            p *= inv;
        }
        self.compose(t)
    }

    pub fn recip(&self) -> Self {
        let inv = C64::new(1.0, 0.0) / self.c[0];
        let mut t = [ZERO; ORDER];
        let mut p = inv;
        for (k, v) in t.iter_mut().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *v = p * sign;
            p *= inv;
        }
        self.compose(t)
    }

    /// Non-negative integer power by repeated multiplication.
    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::constant(C64::new(1.0, 0.0));
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    /// Real power of a jet with positive real value.
    pub fn powf(&self, p: f64) -> Self {
        let a = self.c[0];
        let mut t = [ZERO; ORDER];
        let mut coef = 1.0;
        for (k, v) in t.iter_mut().enumerate() {
            *v = a.powf(p - k as f64) * coef;
            coef *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(t)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        for k in 0..ORDER {
            self.c[k] += o.c[k];
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        for k in 0..ORDER {
            self.c[k] -= o.c[k];
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [ZERO; ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: f64, tol: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exp_of_square() {
        // e^{r²} at r = 0.7: derivatives 2r e, (2 + 4r²) e, (12r + 8r³) e, (12 + 48r² + 16r⁴) e.
        let r = 0.7;
        let x = Jet::variable(r);
        let j = (x * x).exp();
        let e = (r * r).exp();
        assert!(close(j.derivative(0), e, 1e-14));
        assert!(close(j.derivative(1), 2.0 * r * e, 1e-14));
        assert!(close(j.derivative(2), (2.0 + 4.0 * r * r) * e, 1e-14));
        assert!(close(
            j.derivative(3),
            (12.0 * r + 8.0 * r.powi(3)) * e,
            1e-13
        ));
        assert!(close(
            j.derivative(4),
            (12.0 + 48.0 * r * r + 16.0 * r.powi(4)) * e,
            1e-13
        ));
    }

    #[test]
    fn powers_and_reciprocal() {
        let r = 1.3;
        let x = Jet::variable(r);
        let p = x.powf(-0.5);
        assert!(close(p.derivative(2), 0.75 * r.powf(-2.5), 1e-14));
        let q = x.recip();
        assert!(close(q.derivative(3), -6.0 / r.powi(4), 1e-14));
        let l = x.ln();
        assert!(close(l.derivative(4), -6.0 / r.powi(4), 1e-13));
        assert!(close(x.powi(3).derivative(3), 6.0, 1e-14));
        assert!(close(x.differentiate().derivative(0), 1.0, 0.0));
    }
}
