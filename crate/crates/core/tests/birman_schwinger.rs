use std::f64::consts::PI;

use proptest::prelude::*;
use spectra_cert_core::bs::*;
use spectra_cert_core::numerics::extrapolate::log_range_extrapolate;
use spectra_cert_core::numerics::quadrature::composite_gauss;
use spectra_cert_core::numerics::RadialGrid;
use spectra_cert_core::potential::{Potential, PotentialKind};
use spectra_cert_core::C64;

fn gaussian(v0: f64, c_im: f64) -> Potential {
    Potential::new(PotentialKind::Gaussian { v0, c_im }, 3).unwrap()
}

fn legendre(l: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for k in 1..l {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p
}

#[test]
fn addition_theorem_reproduces_green_function() {
    let (r, rp) = (0.7, 1.3);
    for z in [
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 2.0),
        C64::new(-1.0, 1.0),
        C64::new(4.0, 0.5),
    ] {
        for cos in [-0.9, -0.2, 0.35, 0.8] {
            let lmax = 80;
            let p = legendre(lmax, cos);
            let sum: C64 = (0..=lmax)
                .map(|l| partial_wave_green(z, l, r, rp) * ((2 * l + 1) as f64 / (4.0 * PI) * p[l]))
                .sum();
            let s = (r * r + rp * rp - 2.0 * r * rp * cos).sqrt();
            let g = green_function(z, s).unwrap();
            assert!(
                (sum - g).norm() <= 1e-10 * g.norm(),
                "z={z} cos={cos}: {sum} vs {g}"
            );
        }
    }
}

/// `w^{1/2}(r) ∫ G_z(x − y) w^{1/2}(y) f(y) dy` at `|x| = r`, in coordinates centred at `x`.
fn direct_3d(z: C64, w: &dyn Fn(f64) -> f64, f: &dyn Fn(f64) -> f64, r: f64) -> C64 {
    let k = kappa(z);
    let edges: Vec<f64> = (0..=120).map(|j| 0.1 * j as f64).collect();
    let (s, ws) = composite_gauss(&edges, 8);
    let (t, wt) = composite_gauss(&[-1.0, -0.5, 0.0, 0.5, 1.0], 16);
    let mut acc = C64::new(0.0, 0.0);
    for (si, wsi) in s.iter().zip(&ws) {
        let mut ang = 0.0;
        for (ti, wti) in t.iter().zip(&wt) {
            let y = (r * r + si * si + 2.0 * r * si * ti).max(0.0).sqrt();
            ang += wti * w(y).sqrt() * f(y);
        }
        acc += (-k * *si).exp() * (si / (4.0 * PI)) * (2.0 * PI * ang * wsi);
    }
    acc * w(r).sqrt()
}

#[test]
fn partial_wave_normalization_matches_direct_quadrature() {
    let w = |r: f64| (-r * r).exp();
    let f = |r: f64| (-0.5 * r * r).exp() * (1.0 + r);
    let grid = RadialGrid::graded(400, 10.0, 2.0).unwrap();
    for z in [C64::new(0.0, 0.0), C64::new(-1.0, 0.5)] {
        let side = |r: f64| C64::new(w(r).sqrt() * r, 0.0);
        let m = assemble_weighted(
            &Weights {
                left: &side,
                right: &side,
            },
            z,
            &grid,
            0,
        )
        .unwrap();
        let c: Vec<C64> = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .map(|(r, h)| C64::new(h.sqrt() * r * f(*r), 0.0))
            .collect();
        let kc = m.matrix.apply(&c);
        for &i in &[40usize, 100, 160, 220] {
            let r = grid.nodes[i];
            let got = kc[i] / grid.weights[i].sqrt();
            let want = direct_3d(z, &w, &f, r) * r;
            assert!(
                (got - want).norm() <= 1e-3 * want.norm(),
                "z={z} r={r}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn zero_potential_gives_zero_matrix() {
    let grid = RadialGrid::graded(64, 10.0, 2.0).unwrap();
    let m = assemble_bs(&Potential::zero(3), C64::new(-1.0, 0.0), &grid, 4).unwrap();
    assert_eq!(m.norm, 0.0);
    assert_eq!(m.matrix.max_abs(), 0.0);
    assert!(!m.tail_warning);
    let s = m.summary();
    assert_eq!(s.hs_norm, 0.0);
}

#[test]
fn nonnegative_kernel_is_symmetric() {
    let grid = RadialGrid::graded(120, 10.0, 2.0).unwrap();
    let m = assemble_k_tilde_0(&gaussian(1.0, 0.0), &grid, 3).unwrap();
    assert!(m.matrix.symmetry_defect() <= 1e-12 * m.matrix.max_abs());
}

#[test]
fn norm_grows_under_nested_refinement() {
    let v = gaussian(1.0, 0.0);
    let mut grid = RadialGrid::graded(25, 8.0, 2.0).unwrap();
    let mut prev = 0.0;
    for _ in 0..4 {
        let n = assemble_k_tilde_0(&v, &grid, 2).unwrap().norm;
        assert!(n >= prev - 1e-10, "{n} < {prev}");
        prev = n;
        grid = grid.refined();
    }
}

#[test]
fn hardy_norm_converges_to_sharp_constant() {
    let v = Potential::hardy(0.5, 3);
    let vals: Vec<f64> = [200, 400, 800]
        .iter()
        .map(|&n| {
            let g = RadialGrid::graded(n, 40.0, 2.0).unwrap();
            assemble_bs(&v, C64::new(0.0, 0.0), &g, 0).unwrap().norm
        })
        .collect();
    assert!(vals[0] < vals[1] && vals[1] < vals[2] && vals[2] < 0.5);
    let ext =
        log_range_extrapolate([200.0, 400.0, 800.0], [vals[0], vals[1], vals[2]], 2.0).unwrap();
    assert!((ext - 0.5).abs() <= 0.025, "{ext}");
}

#[test]
fn hardy_scan_stays_below_zero_energy_norm() {
    let v = Potential::hardy(0.5, 3);
    let grid = RadialGrid::graded(150, 40.0, 2.0).unwrap();
    let zs = [
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, -1.0),
    ];
    let scan = bs_norm_scan(&v, &zs, &grid, 3).unwrap();
    assert!(scan.passes);
    assert!(scan.rows.iter().all(|r| r.norm <= 0.5 * 1.02));
    assert!(bs_norm_scan(&v, &[C64::new(1.0, 0.0)], &grid, 0).is_err());
}

#[test]
fn gaussian_norm_decreases_along_negative_axis() {
    let v = gaussian(1.0, 0.0);
    let grid = RadialGrid::graded(100, 10.0, 2.0).unwrap();
    let mut prev = f64::INFINITY;
    for t in [0.5, 2.0, 8.0, 32.0] {
        let n = assemble_bs(&v, C64::new(-t, 0.0), &grid, 2).unwrap().norm;
        assert!(n < prev);
        prev = n;
    }
}

#[test]
fn hs_routes_agree_for_gaussian() {
    let v = gaussian(1.0, 0.0);
    let grid = RadialGrid::graded(200, 10.0, 2.0).unwrap();
    let hs = hs_norm(&v, &grid, DEFAULT_ELL_MAX).unwrap();
    assert!((hs.hs_rollnik - PI.sqrt() / 4.0).abs() < 1e-6);
    assert!(hs.relative_gap <= 1e-3, "{hs:?}");
    let op = assemble_k_tilde_0(&v, &grid, 4).unwrap();
    assert!(op.norm <= hs.hs_direct);
    assert!(op.discrete_hs_norm() <= hs.hs_direct * 1.0001);
    assert!(
        hs_norm(&Potential::hardy(0.5, 3), &grid, 4)
            .unwrap()
            .divergent
    );
    assert_eq!(
        hs_norm(&Potential::zero(3), &grid, 4).unwrap().hs_direct,
        0.0
    );
}

#[test]
fn principle_identity_on_random_eigenpairs() {
    use rand::{Rng, SeedableRng};
    use spectra_cert_core::numerics::{eig_complex, DenseComplexMatrix};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let n = 12;
    let mut h0 = DenseComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(2.0 + i as f64, 0.0)
        } else if i.abs_diff(j) == 1 {
            C64::new(-1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-6.0..0.5), rng.random_range(-1.0..1.0)))
        .collect();
    let h0c = h0.clone();
    for i in 0..n {
        let idx = i * n + i;
        h0.as_mut_slice()[idx] += v[i];
    }
    let pairs = eig_complex(&h0).unwrap();
    let mut checked = 0;
    for p in pairs {
        if p.value.re < 0.5 {
            let r = bs_principle_matrix_check(&h0c, &v, p.value, &p.vector).unwrap();
            assert!(r <= 1e-8, "{r}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn kappa_regimes() {
    let eps: Vec<f64> = (0..6).map(|k| 1e-3 * 0.5f64.powi(k)).collect();
    let s0 = kappa_scaling(C64::new(0.0, 0.0), &eps).unwrap();
    assert!(s0.passes && s0.regime == KappaRegime::Threshold);
    let s1 = kappa_scaling(C64::new(1.0, 0.0), &eps).unwrap();
    assert!(s1.passes && (s1.fitted_slope - 1.0).abs() < 0.05);
    let s2 = kappa_scaling(C64::new(-1.0, 0.0), &eps).unwrap();
    assert!(s2.passes && (s2.rows[0].1 - 1.0).abs() < 1e-3);
    assert!(kappa_scaling(C64::new(0.0, 0.0), &[0.0]).is_err());
}

#[test]
fn m_eps_scaling_and_formula() {
    let eps: Vec<f64> = (0..6).map(|k| 1e-3 * 0.5f64.powi(k)).collect();
    let rep = m_eps_hs_check(&gaussian(1.0, 0.0), 2.0, C64::new(0.0, 0.0), &eps).unwrap();
    assert!((rep.eps_hs_slope - 0.75).abs() <= 0.05);
    assert!(rep.max_relative_gap < 1e-10);
    assert!(rep.rows.iter().all(|r| r.hs_formula <= r.hs_bound));
    let hardy = m_eps_hs_check(&Potential::hardy(0.5, 3), 1.0, C64::new(0.0, 0.0), &eps).unwrap();
    assert!(
        hardy.l1_on_ball.is_finite() && (hardy.l1_on_ball - 0.5 * 0.25 * 4.0 * PI).abs() < 1e-8
    );
    let reg = m_eps_hs_check(&gaussian(1.0, 0.0), 2.0, C64::new(-1.0, 0.0), &[1e-3, 2e-3]).unwrap();
    assert!((reg.rows[0].hs_formula / reg.rows[1].hs_formula - 1.0).abs() < 0.01);
}

proptest! {
    #[test]
    fn green_bound_holds_off_positive_axis(re in -100.0f64..100.0, im in -100.0f64..100.0, s in 1e-6f64..100.0) {
        let z = C64::new(re, im);
        prop_assume!(!on_positive_axis(z));
        prop_assert!(kappa(z).re >= 0.0);
        prop_assert!(pointwise_bound_check(z, &[s]).unwrap());
    }
}
