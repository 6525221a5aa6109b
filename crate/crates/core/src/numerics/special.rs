//! Modified spherical Bessel functions of complex argument, in log form.
//!
//! Normalization: `i_0(x) = sinh(x)/x`, `k_0(x) = e^{-x}/x`, so that
//! `i_ℓ k_{ℓ+1} + i_{ℓ+1} k_ℓ = 1/x²`.

use alloc::vec::Vec;

use crate::C64;

/// `ln i_ℓ(x)` for `ℓ = 0..=lmax` (any branch of the log), `Re x > 0`.
pub fn ln_sph_i(x: C64, lmax: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(ln_i0(x));
    if lmax == 0 {
        return out;
    }
    // ratios ρ_ℓ = i_{ℓ+1}/i_ℓ, downward from a continued fraction at lmax-1.
    let mut rho = alloc::vec![C64::new(0.0, 0.0); lmax];
    rho[lmax - 1] = ratio_cf(x, lmax - 1);
    for l in (0..lmax - 1).rev() {
        rho[l] = C64::new(1.0, 0.0) / (C64::new((2 * l + 3) as f64, 0.0) / x + rho[l + 1]);
    }
    for l in 0..lmax {
        let prev = out[l];
        out.push(prev + rho[l].ln());
    }
    out
}

/// `ln k_ℓ(x)` for `ℓ = 0..=lmax` by the (stable) upward recurrence.
pub fn ln_sph_k(x: C64, lmax: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(-x - x.ln());
    let one = C64::new(1.0, 0.0);
    let mut s = one + one / x; // k_1/k_0
    for l in 0..lmax {
        let prev = out[l];
        out.push(prev + s.ln());
        s = one / s + C64::new((2 * l + 3) as f64, 0.0) / x;
    }
    out
}

fn ln_i0(x: C64) -> C64 {
    if x.norm() < 0.5 {
        // sinh(x)/x = Σ x^{2k}/(2k+1)!
        let x2 = x * x;
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term = term * x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum.ln()
    } else {
        let one = C64::new(1.0, 0.0);
        x - (x * 2.0).ln() + (one - (-x * 2.0).exp()).ln()
    }
}

/// `i_{ℓ+1}(x)/i_ℓ(x)` by the modified Lentz continued fraction
/// `1/((2ℓ+3)/x + 1/((2ℓ+5)/x + …))`.
fn ratio_cf(x: C64, l: usize) -> C64 {
    let tiny = 1e-300;
    let one = C64::new(1.0, 0.0);
    let b = |j: usize| C64::new((2 * (l + j) + 3) as f64, 0.0) / x;
    let mut f = b(0);
    if f.norm() < tiny {
        f = C64::new(tiny, 0.0);
    }
    let mut c = f;
    let mut d = C64::new(0.0, 0.0);
    for j in 1..100_000 {
        let bj = b(j);
        d = bj + d;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        c = bj + one / c;
        if c.norm() < tiny {
            c = C64::new(tiny, 0.0);
        }
        d = one / d;
        let delta = c * d;
        f *= delta;
        if (delta - one).norm() < 1e-16 {
            break;
        }
    }
    one / f
}
