use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra_cert_core::multiplier::*;
use spectra_cert_core::numerics::extrapolate::observed_order;
use spectra_cert_core::potential::{MagneticKind, MagneticPotential, Potential, PotentialKind};
use spectra_cert_core::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn bump() -> TestFunction {
    TestFunction::radial_bump(3, 2.0, 6, c(-0.4, 0.3)).unwrap()
}

fn ell1() -> TestFunction {
    TestFunction::ell1_bump(3, 2.0, 6, c(-0.3, -0.5)).unwrap()
}

const Q: Quadrature = Quadrature::Radial { panels: 24, q: 10 };

#[test]
fn identity_one_constant_weight() {
    let r = identity_residual_1(&bump(), c(1.0, 1.0), &Profile::Constant { c: 1.0 }, Q).unwrap();
    assert!(r.residual <= 1e-8, "{r:?}");
    // Constant weight: λ₁∫|u|² − ∫|∇u|² = Re∫fū.
    assert_eq!(r.terms[2].value_re, 0.0);
    let z = identity_residual_1(
        &bump().with_amplitude(c(0.0, 0.0)),
        c(1.0, 1.0),
        &Profile::Constant { c: 1.0 },
        Q,
    )
    .unwrap();
    assert_eq!((z.lhs, z.rhs, z.residual), (0.0, 0.0, 0.0));
}

#[test]
fn identity_one_linear_weight() {
    for u in [bump(), ell1()] {
        let r =
            identity_residual_1(&u, c(0.5, 2.0), &Profile::Power { c: 1.0, p: 1.0 }, Q).unwrap();
        assert!(r.residual <= 1e-6, "{r:?}");
    }
}

#[test]
fn identity_two() {
    let real = TestFunction::radial_bump(3, 2.0, 6, c(-0.4, 0.0)).unwrap();
    let r = identity_residual_2(&real, c(1.5, 0.0), &Profile::Constant { c: 1.0 }, Q).unwrap();
    assert!(r.lhs.abs() <= 1e-12 && r.rhs.abs() <= 1e-12, "{r:?}");
    let r = identity_residual_2(&bump(), c(1.0, 1.0), &Profile::Constant { c: 1.0 }, Q).unwrap();
    assert!(r.residual <= 1e-8, "{r:?}");
    let r =
        identity_residual_2(&ell1(), c(1.0, 1.0), &Profile::Power { c: 1.0, p: 1.0 }, Q).unwrap();
    assert!(r.residual <= 1e-6, "{r:?}");
}

#[test]
fn identity_three() {
    for g in [
        Profile::Power { c: 1.0, p: 2.0 },
        Profile::WindowedQuadratic { a: 0.1 },
    ] {
        for u in [bump(), ell1()] {
            let r = identity_residual_3(&u, c(1.0, 1.0), &g, Q).unwrap();
            assert!(r.residual <= 1e-6, "{g:?} {r:?}");
        }
    }
    // G₃ = |x|²: Hessian term is 2∫|∇u|², Δ²G₃ = 0.
    let r =
        identity_residual_3(&bump(), c(1.0, 1.0), &Profile::Power { c: 1.0, p: 2.0 }, Q).unwrap();
    assert!(r.terms[1].value_re.abs() < 1e-12);
}

#[test]
fn key_identity() {
    for lambda in [c(1.0, 0.0), c(1.0, 1.0), c(0.5, 2.0), c(2.0, -0.7)] {
        for u in [bump(), ell1()] {
            let r = key_identity_residual(&u, lambda, Q).unwrap();
            let tol = if lambda.im == 0.0 { 1e-7 } else { 1e-6 };
            assert!(r.residual <= tol, "{lambda} {r:?}");
        }
    }
    assert!(key_identity_residual(&bump(), c(0.0, 1.0), Q).is_err());
}

#[test]
fn key_identity_needs_modulus_of_lambda2() {
    // With λ₂ < 0 the I₃ coefficient must be |λ₂|/√λ₁; flipping its sign breaks the identity.
    let lambda = c(1.0, -0.8);
    let r = key_identity_residual(&bump(), lambda, Q).unwrap();
    assert!(r.residual <= 1e-8);
    let i3 = r.terms.iter().find(|t| t.name == "I3").unwrap().value_re;
    let flipped = relative_residual(r.lhs, r.rhs - 2.0 * i3, r.norm_sq);
    assert!(flipped > 1e-3, "{flipped}");
}

#[test]
fn canonical_triple() {
    for lambda in [c(1.0, 1.0), c(1.0, -1.0), c(2.0, 0.0)] {
        let t = MultiplierTriple::canonical(lambda);
        for r in [0.1, 0.7, 3.0] {
            let [a, b, s] = t.cancellations(lambda, 3, r);
            assert!(
                a.abs() < 1e-14 && b.abs() < 1e-14 && s.abs() < 1e-14,
                "{a} {b} {s}"
            );
        }
        for u in [bump(), ell1()] {
            let rep = triple_identity(&u, lambda, &t, Q).unwrap();
            assert!(rep.residual <= 1e-8, "{rep:?}");
        }
    }
}

#[test]
fn residual_order_under_refinement() {
    let u = bump();
    let lambda = c(1.0, 1.0);
    let coarse = Quadrature::Radial { panels: 3, q: 2 };
    let fine = Quadrature::Radial { panels: 6, q: 2 };
    assert!(key_identity_residual(&u, lambda, coarse).is_err());
    let e1 = key_identity_single_level(&u, lambda, coarse)
        .unwrap()
        .residual;
    let e2 = key_identity_single_level(&u, lambda, fine)
        .unwrap()
        .residual;
    let order = observed_order(e1, e2);
    assert!(order >= 1.9, "{e1} {e2} {order}");
}

#[test]
fn box_path_agrees_for_ell1() {
    let u = ell1();
    let lambda = c(1.0, 1.0);
    let g = Profile::Power { c: 1.0, p: 1.0 };
    let radial = identity_residual_1(&u, lambda, &g, Q).unwrap();
    let boxed = identity_1_single_level(&u, lambda, &g, Quadrature::Box { n: 48 }).unwrap();
    assert!(boxed.residual <= 1e-4, "{boxed:?}");
    assert!((boxed.lhs - radial.lhs).abs() <= 1e-4 * radial.lhs.abs().max(radial.norm_sq));
}

#[test]
fn gauge() {
    let u = ell1();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for lambda in [c(1.0, 0.0), c(1.0, 1.0), c(2.0, -3.0)] {
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.5..1.5)).collect();
            let r = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            let s = u.sample(&x, r);
            for plus in [true, false] {
                let (v, _) = gauge_transform(&u, lambda, plus, &x).unwrap();
                assert!((v.norm() - s.u.norm()).abs() <= 1e-14 * (1.0 + s.u.norm()));
            }
            let defect = gauge_gradient_expansion_defect(&u, lambda, &x).unwrap();
            assert!(defect.abs() < 1e-12, "{defect}");
        }
        for plus in [true, false] {
            for (a, b) in gauge_moduli(&u, lambda, plus, Q).unwrap() {
                assert!((a - b).abs() <= 1e-13 * b);
            }
        }
    }
    // λ₂ = 0 uses sgn = 1: u⁻ = e^{−i√λ₁|x|}u.
    assert_eq!(
        gauge_phase(c(4.0, 0.0), false, 1.0).unwrap(),
        C64::new(0.0, -2.0).exp()
    );
    assert!(gauge_phase(c(0.0, 1.0), true, 1.0).is_err());
    assert!(gauge_transform(&u, c(-1.0, 1.0), true, &[1.0, 0.0, 0.0]).is_err());
}

#[test]
fn hardy_family() {
    let r = hardy_check(&bump(), Q).unwrap();
    assert!(r.hardy < 4.0 && r.weighted < 1.0, "{r:?}");
    let psi = TestFunction::near_extremal(3, 0.05).unwrap();
    let r = hardy_check(&psi, Q).unwrap();
    assert!(
        r.hardy >= 0.9 * r.hardy_bound && r.hardy <= r.hardy_bound,
        "{r:?}"
    );
    assert!(r.weighted <= r.weighted_bound, "{r:?}");
    // Closed-form 1D oracle for the same quotient.
    let eps: f64 = 0.05;
    let s = -0.5 + eps;
    let (num, den) = oracle_hardy_1d(s, eps);
    assert!(
        (r.hardy - num / den).abs() <= 1e-9,
        "{} {}",
        r.hardy,
        num / den
    );
    assert!(hardy_check(&bump().with_amplitude(c(0.0, 0.0)), Q).is_err());
}

/// `∫₀¹ ψ² dr` and `∫₀¹ ψ'² r² dr` for `ψ = r^s(1 − r^{2ε})` in closed form.
fn oracle_hardy_1d(s: f64, eps: f64) -> (f64, f64) {
    // ψ² = r^{2s} − 2r^{2s+2ε} + r^{2s+4ε}; ∫ r^p = 1/(p+1).
    let int = |p: f64| 1.0 / (p + 1.0);
    let num = int(2.0 * s) - 2.0 * int(2.0 * s + 2.0 * eps) + int(2.0 * s + 4.0 * eps);
    // ψ' r = s r^s − (s+2ε) r^{s+2ε}.
    let a = s;
    let b = s + 2.0 * eps;
    let den = a * a * int(2.0 * s) - 2.0 * a * b * int(2.0 * s + 2.0 * eps)
        + b * b * int(2.0 * s + 4.0 * eps);
    (num, den)
}

#[test]
fn case_split() {
    let lambda = c(0.5, 2.0);
    let zero = Potential::zero(3);
    assert_eq!(
        case_split_bound(&bump(), lambda, &zero, Q).unwrap().verdict,
        ProbeVerdict::VacuousPass
    );
    let weak = Potential::new(PotentialKind::ImaginaryHardy { beta: 0.05 }, 3).unwrap();
    for u in [bump(), ell1()] {
        let rep = case_split_bound(&u, lambda, &weak, Q).unwrap();
        assert_eq!(rep.verdict, ProbeVerdict::Pass, "{rep:?}");
        assert!(rep.identity_residual <= 1e-8);
    }
    let strong = Potential::new(PotentialKind::ImaginaryHardy { beta: 0.2 }, 3).unwrap();
    assert_eq!(
        case_split_bound(&bump(), lambda, &strong, Q)
            .unwrap()
            .verdict,
        ProbeVerdict::Inconclusive
    );
    assert!(case_split_bound(&bump(), c(1.0, 0.5), &weak, Q).is_err());
}

#[test]
fn radial_derivative_identity() {
    let lambda = c(1.0, 0.5);
    let ih = Potential::new(PotentialKind::ImaginaryHardy { beta: 0.05 }, 3).unwrap();
    for u in [bump(), ell1()] {
        let rep = radi_identity_terms(&u, lambda, &ih, Q).unwrap();
        assert!(rep.residual <= 1e-6, "{rep:?}");
        assert!(rep.chain_holds(), "{rep:?}");
        assert!(rep.chain.iter().all(|c| c.applicable), "{rep:?}");
    }
    let coul = Potential::new(PotentialKind::CoulombRepulsive { c: 0.3 }, 3).unwrap();
    let rep = radi_identity_terms(&bump(), lambda, &coul, Q).unwrap();
    assert_eq!(rep.term("I1"), Some(0.0));
    assert_eq!(rep.term("I2"), Some(0.0));
    assert!(rep.residual <= 1e-6);
    let g = Potential::new(PotentialKind::Gaussian { v0: 0.5, c_im: 0.2 }, 3).unwrap();
    let rep = radi_identity_terms(&ell1(), c(2.0, 1.0), &g, Q).unwrap();
    assert!(rep.residual <= 1e-6 && rep.chain_holds(), "{rep:?}");
    let sw = Potential::new(PotentialKind::SquareWell { v0: 0.5, r0: 1.0 }, 3).unwrap();
    let rep = radi_identity_terms(&bump(), lambda, &sw, Q).unwrap();
    assert!(rep.residual <= 1e-6, "{rep:?}");
}

#[test]
fn magnetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples: Vec<Vec<f64>> = (0..100)
        .map(|_| (0..3).map(|_| rng.random_range(-1.5..1.5)).collect())
        .collect();
    let v = Potential::new(PotentialKind::Gaussian { v0: 0.5, c_im: 0.3 }, 3).unwrap();
    let lambda = c(1.0, 1.0);
    let swirl =
        MagneticPotential::new(MagneticKind::InverseSquareSwirl { strength: 0.4 }, 3).unwrap();
    for u in [bump(), ell1()] {
        let rep = magnetic_identity_smoke(&u, lambda, &v, &swirl, &samples, Q).unwrap();
        assert!(
            rep.max_b_tau_grad <= 1e-10 && rep.max_tangential_defect <= 1e-10,
            "{rep:?}"
        );
        assert!(rep.residual <= 1e-6, "{rep:?}");
    }
    let uniform = MagneticPotential::new(MagneticKind::Uniform { strength: 0.7 }, 3).unwrap();
    let rep = magnetic_identity_smoke(&ell1(), lambda, &v, &uniform, &samples, Q).unwrap();
    assert!(rep.max_b_tau_dot_x <= 1e-10 && rep.max_tangential_defect <= 1e-10);
    assert!(rep.max_b_tau_grad > 1e-3);
    assert!(rep.residual <= 1e-6, "{rep:?}");
    // A ≡ 0 reduces to the first identity with f = Δu + λu − Vu.
    let zero = MagneticPotential::new(MagneticKind::Zero, 3).unwrap();
    let free = Potential::zero(3);
    let rep = magnetic_identity_smoke(&bump(), lambda, &free, &zero, &samples, Q).unwrap();
    let id1 = identity_residual_1(&bump(), lambda, &Profile::Constant { c: 1.0 }, Q).unwrap();
    assert!((rep.lhs - id1.lhs).abs() <= 1e-10 * id1.lhs.abs());
    assert!(magnetic_identity_smoke(&bump(), lambda, &v, &swirl, &[vec![0.0; 3]], Q).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_data_has_no_imaginary_identity(q in -1.0f64..0.0, l1 in 0.2f64..3.0, rho in 1.0f64..3.0) {
        let u = TestFunction::radial_bump(3, rho, 5, c(q, 0.0)).unwrap();
        let r = identity_residual_2(&u, c(l1, 0.0), &Profile::Constant { c: 1.0 }, Q).unwrap();
        prop_assert!(r.lhs.abs() <= 1e-12 && r.rhs.abs() <= 1e-12);
    }

    #[test]
    fn identities_hold_across_parameters(qr in -0.8f64..0.0, qi in -1.0f64..1.0, l1 in 0.2f64..3.0, l2 in -3.0f64..3.0) {
        let u = TestFunction::radial_bump(3, 2.0, 6, c(qr, qi)).unwrap();
        let lambda = c(l1, l2);
        let r1 = identity_residual_1(&u, lambda, &Profile::Power { c: 1.0, p: 1.0 }, Q).unwrap();
        let r2 = identity_residual_2(&u, lambda, &Profile::Power { c: 1.0, p: 1.0 }, Q).unwrap();
        let r3 = identity_residual_3(&u, lambda, &Profile::WindowedQuadratic { a: 0.1 }, Q).unwrap();
        let rk = key_identity_residual(&u, lambda, Q).unwrap();
        prop_assert!(r1.residual <= 1e-6 && r2.residual <= 1e-6 && r3.residual <= 1e-6 && rk.residual <= 1e-6);
    }
}
