//! The ten acceptance criteria at their stated tolerances. Each prints one
//! `PASS`/`FAIL` line; the test fails if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra_cert_core::bs::{
    assemble_bs, assemble_k_tilde_0, bs_principle_matrix_check, green_modulus, hs_norm, kappa,
    kappa_scaling, m_eps_hs_check, on_positive_axis, pointwise_bound_check, DEFAULT_ELL_MAX,
};
use spectra_cert_core::conditions::{lambda_star_equation, thresholds};
use spectra_cert_core::multiplier::*;
use spectra_cert_core::numerics::extrapolate::{log_range_extrapolate, observed_order};
use spectra_cert_core::numerics::RadialGrid;
use spectra_cert_core::potential::{
    b_tau, b_tau_finite_difference, MagneticKind, MagneticPotential, Potential, PotentialKind,
};
use spectra_cert_core::spectral::{
    discretize_radial, singular_sequence_decay, spectrum, BumpProfile,
};
use spectra_cert_core::C64;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for i in 0..1000 {
        let z = if i % 4 == 0 {
            c(-rng.random_range(0.0..100.0), 0.0)
        } else {
            c(
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            )
        };
        if on_positive_axis(z) {
            continue;
        }
        let s = 100.0 * (1.0 - rng.random::<f64>());
        ok &= kappa(z).re >= 0.0;
        let g = green_modulus(z, s).unwrap();
        let g0 = green_modulus(c(0.0, 0.0), s).unwrap();
        ok &= g <= g0;
        ok &= pointwise_bound_check(z, &[s]).unwrap();
        worst = worst.max(g / g0);
    }
    (ok, format!("max |G_z|/G_0 = {worst:.6}"))
}

fn criterion_2() -> Outcome {
    let v = Potential::hardy(0.5, 3);
    let grid = RadialGrid::graded(200, 40.0, 2.0).unwrap();
    let zs = [
        c(-10.0, 0.0),
        c(-1.0, 0.0),
        c(-0.1, 0.0),
        c(0.0, 1.0),
        c(0.0, -1.0),
        c(-1.0, 1.0),
        c(-1.0, -1.0),
    ];
    let mut max_norm = 0.0f64;
    for z in zs {
        max_norm = max_norm.max(assemble_bs(&v, z, &grid, 4).unwrap().norm);
    }
    let vals: Vec<f64> = [200, 400, 800]
        .iter()
        .map(|&n| {
            let g = RadialGrid::graded(n, 40.0, 2.0).unwrap();
            assemble_k_tilde_0(&v, &g, 0).unwrap().norm
        })
        .collect();
    let ext =
        log_range_extrapolate([200.0, 400.0, 800.0], [vals[0], vals[1], vals[2]], 2.0).unwrap();
    let ok = max_norm <= 0.5 * 1.02 && (ext - 0.5).abs() <= 0.05 * 0.5;
    (
        ok,
        format!("max ||K_z|| = {max_norm:.5}, extrapolated ||K0|| = {ext:.5}"),
    )
}

fn criterion_3() -> Outcome {
    let v = Potential::new(PotentialKind::Gaussian { v0: 1.0, c_im: 0.0 }, 3).unwrap();
    let grid = RadialGrid::graded(200, 10.0, 2.0).unwrap();
    let hs = hs_norm(&v, &grid, DEFAULT_ELL_MAX).unwrap();
    let sigma = assemble_k_tilde_0(&v, &grid, 4).unwrap().norm;
    // ‖V‖_R/(4π) = √π/4 for V = −e^{−r²}.
    let closed = PI.sqrt() / 4.0;
    let gap = (hs.hs_direct - hs.hs_rollnik).abs() / hs.hs_rollnik;
    let ok = gap <= 1e-3 && sigma <= hs.hs_direct && (hs.hs_rollnik - closed).abs() <= 1e-6;
    (
        ok,
        format!(
            "relative gap {gap:.2e}, sigma_max {sigma:.5} <= hs_direct {:.5}",
            hs.hs_direct
        ),
    )
}

fn criterion_4() -> Outcome {
    let t = thresholds(3).unwrap();
    let rational = (t.thm12_b_max_num, t.thm12_b_max_den) == (1, 7);
    let lhs = lambda_star_equation(3, t.lambda_star) + 1.0;
    let ok = rational
        && (t.lambda_star - 0.1525).abs() <= 0.0005
        && (lhs - 1.0).abs() <= 1e-10
        && (t.sqrt_b3_max - 0.55209).abs() <= 1e-4;
    (
        ok,
        format!(
            "{}/{}, Lambda* = {:.6}, |LHS-1| = {:.1e}, sqrt(b3) bound = {:.6}",
            t.thm12_b_max_num,
            t.thm12_b_max_den,
            t.lambda_star,
            (lhs - 1.0).abs(),
            t.sqrt_b3_max
        ),
    )
}

fn criterion_5() -> Outcome {
    let q = Quadrature::default();
    let us = [
        TestFunction::radial_bump(3, 2.0, 6, c(-0.4, 0.3)).unwrap(),
        TestFunction::ell1_bump(3, 2.0, 6, c(-0.3, -0.5)).unwrap(),
    ];
    let mut residuals = Vec::new();
    for lambda in [c(1.0, 0.0), c(1.0, 1.0), c(0.5, 2.0)] {
        for u in &us {
            residuals.push(key_identity_residual(u, lambda, q).unwrap().residual);
            let t = MultiplierTriple::canonical(lambda);
            residuals.push(triple_identity(u, lambda, &t, q).unwrap().residual);
        }
    }
    let lambda = c(1.0, 1.0);
    for u in &us {
        let p1 = Profile::Power { c: 1.0, p: 1.0 };
        residuals.push(identity_residual_1(u, lambda, &p1, q).unwrap().residual);
        residuals.push(identity_residual_2(u, lambda, &p1, q).unwrap().residual);
        let r2 = Profile::Power { c: 1.0, p: 2.0 };
        residuals.push(identity_residual_3(u, lambda, &r2, q).unwrap().residual);
        let w = Profile::WindowedQuadratic { a: 0.1 };
        residuals.push(identity_residual_3(u, lambda, &w, q).unwrap().residual);
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let coarse = Quadrature::Radial { panels: 3, q: 2 };
    let fine = Quadrature::Radial { panels: 6, q: 2 };
    let e1 = key_identity_single_level(&us[0], lambda, coarse)
        .unwrap()
        .residual;
    let e2 = key_identity_single_level(&us[0], lambda, fine)
        .unwrap()
        .residual;
    let order = observed_order(e1, e2);
    let ok = residuals.len() == 20 && worst <= 1e-6 && order >= 1.9;
    (
        ok,
        format!(
            "{} combinations, max residual {worst:.1e}, order {order:.2}",
            residuals.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    let q = Quadrature::default();
    let mut ok = true;
    let mut at_005 = 0.0;
    for eps in [0.5, 0.3, 0.2, 0.1, 0.05] {
        let r = hardy_check(&TestFunction::near_extremal(3, eps).unwrap(), q).unwrap();
        ok &= r.weighted <= r.weighted_bound && r.hardy <= r.hardy_bound;
        if eps == 0.05 {
            at_005 = r.hardy / r.hardy_bound;
            ok &= r.hardy >= 0.9 * r.hardy_bound;
        }
    }
    (
        ok,
        format!(
            "Hardy quotient at eps = 0.05 reaches {:.2}% of 4",
            100.0 * at_005
        ),
    )
}

/// Ground state of the unit s-wave well by bisection on `k cot k + κ = 0`.
fn well_oracle(v0: f64) -> f64 {
    let f = |e: f64| {
        let k = (v0 + e).sqrt();
        k / k.tan() + (-e).sqrt()
    };
    let (mut lo, mut hi) = (-v0 + 1e-12, (-v0 + PI * PI).min(0.0) - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_7() -> Outcome {
    let hardy = Potential::hardy(0.5, 3);
    let mut hardy_outliers = 0;
    for ell in 0..=2 {
        for n in [64, 128, 256] {
            let s = spectrum(&discretize_radial(&hardy, ell, 40.0, n).unwrap(), None).unwrap();
            hardy_outliers += s.outliers.len();
        }
    }
    let well = |v0: f64| Potential::new(PotentialKind::SquareWell { v0, r0: 1.0 }, 3).unwrap();
    let threshold = PI * PI / 4.0;
    let count = |v0: f64| {
        let op = discretize_radial(&well(v0), 0, 80.0, 799).unwrap();
        let s = spectrum(&op, Some(1e-3)).unwrap();
        (op, s)
    };
    let (_, below) = count(0.95 * threshold);
    let (op_above, above) = count(1.05 * threshold);
    let v0 = 5.0 * PI * PI / 4.0;
    let op = discretize_radial(&well(v0), 0, 10.0, 999).unwrap();
    let s = spectrum(&op, None).unwrap();
    let want = well_oracle(v0);
    let got = s
        .outliers
        .first()
        .map(|&i| s.eigenvalues[i].re)
        .unwrap_or(f64::NAN);
    let rel = ((got - want) / want).abs();
    let mut bs_worst = 0.0f64;
    for (o, sp) in [(&op_above, &above), (&op, &s)] {
        for (k, &i) in sp.outliers.iter().enumerate() {
            let r = bs_principle_matrix_check(
                &o.free_matrix(),
                &o.v_diag,
                sp.eigenvalues[i],
                &sp.outlier_vectors[k],
            )
            .unwrap();
            bs_worst = bs_worst.max(r);
        }
    }
    let ok = hardy_outliers == 0
        && below.outliers.is_empty()
        && above.outliers.len() == 1
        && s.outliers.len() == 1
        && rel <= 0.01
        && bs_worst <= 1e-8;
    (
        ok,
        format!(
            "hardy outliers {hardy_outliers}, count {}->{}, E0 {got:.5} vs {want:.5} ({:.3}%), BS residual {bs_worst:.1e}",
            below.outliers.len(),
            above.outliers.len(),
            100.0 * rel
        ),
    )
}

fn criterion_8() -> Outcome {
    let b = BumpProfile::new(3).unwrap().normalized();
    let ns: Vec<f64> = (1..=6).map(|k| 2f64.powi(k)).collect();
    let moving = singular_sequence_decay(&b, [60.0, 0.0, 0.0], 0.5, &ns).unwrap();
    let still = singular_sequence_decay(&b, [0.0, 0.0, 0.0], 0.5, &ns).unwrap();
    let ok = (moving.residual_slope + 1.0).abs() <= 0.01
        && (still.residual_slope + 2.0).abs() <= 0.01
        && (moving.potential_slope + 2.0).abs() <= 0.01;
    (
        ok,
        format!(
            "slopes k!=0 {:.4}, k=0 {:.4}, potential {:.4}",
            moving.residual_slope, still.residual_slope, moving.potential_slope
        ),
    )
}

fn criterion_9() -> Outcome {
    let eps: Vec<f64> = (0..6).map(|k| 1e-3 * 0.5f64.powi(k)).collect();
    let mut slopes = Vec::new();
    let mut ok = true;
    for (lambda, want) in [(c(0.0, 0.0), 0.5), (c(1.0, 0.0), 1.0), (c(-1.0, 0.0), 0.0)] {
        let s = kappa_scaling(lambda, &eps).unwrap();
        ok &= (s.fitted_slope - want).abs() <= 0.05;
        slopes.push(s.fitted_slope);
    }
    let v = Potential::new(PotentialKind::Gaussian { v0: 1.0, c_im: 0.0 }, 3).unwrap();
    let m = m_eps_hs_check(&v, 2.0, c(0.0, 0.0), &eps).unwrap();
    ok &= (m.eps_hs_slope - 0.75).abs() <= 0.05;
    ok &=
        m.rows.last().map(|r| r.eps * r.hs_formula) < m.rows.first().map(|r| r.eps * r.hs_formula);
    (
        ok,
        format!(
            "kappa slopes {:.3}/{:.3}/{:.3}, eps*hs slope {:.3}",
            slopes[0], slopes[1], slopes[2], m.eps_hs_slope
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let swirl =
        MagneticPotential::new(MagneticKind::InverseSquareSwirl { strength: 1.3 }, 3).unwrap();
    let uniform = MagneticPotential::new(MagneticKind::Uniform { strength: 0.7 }, 3).unwrap();
    let (mut an, mut fd, mut dot) = (0.0f64, 0.0f64, 0.0f64);
    let mut n = 0;
    while n < 100 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        if x.iter().map(|t| t * t).sum::<f64>() < 0.01 {
            continue;
        }
        n += 1;
        let a = b_tau(&swirl, &x).unwrap();
        let f = b_tau_finite_difference(&swirl, &x, 1e-5).unwrap();
        an = an.max(a.iter().map(|t| t.abs()).fold(0.0, f64::max));
        fd = fd.max(f.iter().map(|t| t.abs()).fold(0.0, f64::max));
        let bt = b_tau(&uniform, &x).unwrap();
        dot = dot.max(bt.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>().abs());
    }
    let ok = an <= 1e-10 && fd <= 1e-6 && dot <= 1e-10;
    (
        ok,
        format!(
            "max |B_tau| analytic {an:.1e}, finite-difference {fd:.1e}; max |B_tau.x| {dot:.1e}"
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("green pointwise bound", criterion_1),
        ("hardy Birman-Schwinger norm", criterion_2),
        ("Hilbert-Schmidt/Rollnik identity", criterion_3),
        ("threshold table", criterion_4),
        ("multiplier identities", criterion_5),
        ("Hardy sharpness", criterion_6),
        ("spectral absence and emergence", criterion_7),
        ("singular-sequence rates", criterion_8),
        ("kappa and M_eps scaling", criterion_9),
        ("magnetic structure", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "criterion {:>2} {}: {name}: {detail} [{secs:.2} s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
