//! Dispatch of one experiment to the core modules.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use spectra_cert_core::bs::{
    assemble_bs, assemble_k_tilde_0, hs_norm, BSSummary, HsReport, SCAN_SLACK,
};
use spectra_cert_core::conditions::{check_conditions, subordination_a_pointwise};
use spectra_cert_core::multiplier::{
    identity_residual_1, identity_residual_2, identity_residual_3, key_identity_residual,
    magnetic_identity_smoke, radi_identity_terms, triple_identity, IdentityReport, MagneticReport,
    MultiplierTriple, Profile, Quadrature, RadiReport, TestFunction,
};
use spectra_cert_core::numerics::RadialGrid;
use spectra_cert_core::potential::{
    b_tau, b_tau_finite_difference, MagneticKind, MagneticPotential, Potential,
};
use spectra_cert_core::spectral::{
    discretize_box, discretize_radial, distance_to_half_line, pseudospectrum,
    singular_sequence_decay, spectrum, BumpProfile, DiscretizedOperator, PseudoPoint,
};
use spectra_cert_core::{Error as CoreError, C64};

use crate::config::{
    c64, Experiment, ExperimentConfig, Format, IdentityName, Operator, DEFAULT_BOX_L, DEFAULT_K,
    DEFAULT_LEVELS, DEFAULT_SAMPLES,
};
use crate::output::{Check, RunManifest, StageTiming, Writer};
use crate::RunError;

/// Grading exponent of the radial grids used by `bs-norm` and `hs-identity`.
const GRID_GRADING: f64 = 2.0;
/// Tolerance for identity residuals.
pub const IDENTITY_TOL: f64 = 1e-6;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    out: Writer,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn wants(&self, f: Format) -> bool {
        self.cfg.output.formats.contains(&f)
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    fn core<T>(&self, op: &'static str, r: Result<T, CoreError>) -> Result<T, RunError> {
        r.map_err(|source| RunError::Core {
            experiment: self.cfg.experiment,
            op,
            source,
        })
    }
}

/// Runs a validated config, writes its outputs and the manifest.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest, RunError> {
    let mut stages = Vec::new();
    let t = Instant::now();
    cfg.validate()?;
    let v = cfg.potential()?;
    stages.push(timing("validate", t));

    let mut ctx = Ctx {
        cfg,
        out: Writer::new(cfg.output.path.clone()),
        checks: Vec::new(),
    };
    let t = Instant::now();
    log::info!("running {} on {}", cfg.experiment, v.name());
    match cfg.experiment {
        Experiment::CheckConditions => conditions(&mut ctx, &v)?,
        Experiment::BsNorm => bs_norm(&mut ctx, &v)?,
        Experiment::HsIdentity => hs_identity(&mut ctx, &v)?,
        Experiment::Spectrum => spectrum_run(&mut ctx, &v)?,
        Experiment::Pseudospectrum => pseudo_run(&mut ctx, &v)?,
        Experiment::IdentityCheck => identity_check(&mut ctx, &v)?,
        Experiment::SingularSequence => singular_sequence(&mut ctx, &v)?,
        Experiment::MagneticSmoke => magnetic_smoke(&mut ctx, &v)?,
    }
    stages.push(timing("compute-and-write", t));

    let passed = ctx.checks.iter().all(|c| c.passed);
    let manifest = RunManifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        stages,
        files: ctx.out.files.clone(),
        checks: ctx.checks,
        passed,
    };
    manifest.verify(&ctx.out.dir)?;
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    crate::output::write_atomic(&ctx.out.dir.join("manifest.json"), &bytes)?;
    Ok(manifest)
}

fn timing(stage: &str, t: Instant) -> StageTiming {
    let seconds = t.elapsed().as_secs_f64();
    log::info!("stage {stage}: {seconds:.3} s");
    StageTiming {
        stage: stage.to_string(),
        seconds,
    }
}

fn grid(ctx: &Ctx<'_>) -> Result<RadialGrid, RunError> {
    ctx.core(
        "numerics::RadialGrid::graded",
        RadialGrid::graded(ctx.cfg.grid_n, ctx.cfg.r_max, GRID_GRADING),
    )
}

fn conditions(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let g = if v.dimension == 3 {
        Some(grid(ctx)?)
    } else {
        None
    };
    let rep = ctx.core(
        "conditions::check_conditions",
        check_conditions(v, g.as_ref()),
    )?;
    if let Some(av) = rep.a_variational {
        ctx.check(
            "variational a <= pointwise a",
            av <= rep.a_pointwise * (1.0 + 1e-9) + 1e-12,
            format!("{av} vs {}", rep.a_pointwise),
        );
    }
    let nonneg = [rep.a, rep.lambda, rep.b1, rep.b2, rep.b3]
        .iter()
        .all(|x| *x >= 0.0);
    ctx.check("constants non-negative", nonneg, "");
    ctx.out.json("conditions.json", &rep)
}

#[derive(Serialize)]
struct BsNormOutput {
    norm_at_zero: f64,
    slack: f64,
    passes: bool,
    /// `z = 0` first, then `z_list` in order.
    matrices: Vec<BSSummary>,
}

#[derive(Serialize)]
struct BsNormRow {
    z_re: f64,
    z_im: f64,
    norm: f64,
    within_bound: bool,
}

fn bs_norm(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let g = grid(ctx)?;
    let mut zs = vec![C64::new(0.0, 0.0)];
    zs.extend(ctx.cfg.z_points());
    let mut matrices = Vec::with_capacity(zs.len());
    for z in zs {
        let m = ctx.core("bs::assemble_bs", assemble_bs(v, z, &g, ctx.cfg.ell_max))?;
        if m.tail_warning {
            log::warn!("partial-wave tail not negligible at z = {z}");
        }
        matrices.push(m.summary());
    }
    let n0 = matrices[0].norm;
    let bound = n0 * (1.0 + SCAN_SLACK);
    let rows: Vec<BsNormRow> = matrices[1..]
        .iter()
        .map(|m| BsNormRow {
            z_re: m.z_re,
            z_im: m.z_im,
            norm: m.norm,
            within_bound: m.norm <= bound,
        })
        .collect();
    let passes = rows.iter().all(|r| r.within_bound);
    ctx.check(
        "norm(z) <= norm(0) (1 + slack)",
        passes,
        format!("norm(0) = {n0}"),
    );
    if ctx.wants(Format::Json) {
        ctx.out.json(
            "bs_norm.json",
            &BsNormOutput {
                norm_at_zero: n0,
                slack: SCAN_SLACK,
                passes,
                matrices,
            },
        )?;
    }
    if ctx.wants(Format::Csv) {
        ctx.out.csv("bs_norm.csv", &rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HsOutput {
    hs: HsReport,
    /// `‖K̃₀‖` of the assembled matrix.
    sigma_max: f64,
}

fn hs_identity(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let g = grid(ctx)?;
    let hs = ctx.core("bs::hs_norm", hs_norm(v, &g, ctx.cfg.ell_max))?;
    let sigma_max = ctx
        .core(
            "bs::assemble_k_tilde_0",
            assemble_k_tilde_0(v, &g, ctx.cfg.ell_max),
        )?
        .norm;
    if hs.divergent {
        ctx.check(
            "hilbert-schmidt identity",
            true,
            "not applicable: the Rollnik norm diverges",
        );
    } else {
        ctx.check(
            "hs_direct matches rollnik/(4 pi)",
            hs.relative_gap <= 1e-3,
            format!("relative gap {:e}", hs.relative_gap),
        );
        ctx.check(
            "sigma_max <= hs_direct",
            sigma_max <= hs.hs_direct * (1.0 + 1e-12),
            format!("{sigma_max} vs {}", hs.hs_direct),
        );
    }
    ctx.out
        .json("hs_identity.json", &HsOutput { hs, sigma_max })
}

fn operator(ctx: &Ctx<'_>, v: &Potential) -> Result<DiscretizedOperator, RunError> {
    let c = ctx.cfg;
    match c.operator {
        Operator::Radial => ctx.core(
            "spectral::discretize_radial",
            discretize_radial(v, c.ell, c.r_max, c.grid_n),
        ),
        Operator::Box => ctx.core(
            "spectral::discretize_box",
            discretize_box(v, c.box_l.unwrap_or(DEFAULT_BOX_L), c.grid_n),
        ),
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    re: f64,
    im: f64,
    residual: f64,
    is_outlier: bool,
}

fn spectrum_run(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let op = operator(ctx, v)?;
    let rep = ctx.core("spectral::spectrum", spectrum(&op, ctx.cfg.outlier_tol))?;
    let worst = rep.residuals.iter().copied().fold(0.0, f64::max);
    ctx.check(
        "eigenpair residuals within bound",
        worst <= rep.residual_bound,
        format!("max residual {worst:e}, bound {:e}", rep.residual_bound),
    );
    log::info!("{} outlier(s)", rep.outliers.len());
    if ctx.wants(Format::Json) {
        ctx.out.json("spectrum.json", &rep)?;
    }
    if ctx.wants(Format::Csv) {
        let rows: Vec<SpectrumRow> = rep
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, z)| SpectrumRow {
                re: z.re,
                im: z.im,
                residual: rep.residuals[i],
                is_outlier: rep.is_outlier(i),
            })
            .collect();
        ctx.out.csv("spectrum.csv", &rows)?;
    }
    Ok(())
}

fn pseudo_run(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let op = operator(ctx, v)?;
    let window = ctx.cfg.z_window.expect("validated");
    let zs = ctx.core("spectral::ZWindow::points", window.points())?;
    let levels = ctx
        .cfg
        .levels
        .clone()
        .unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    let ps = pseudospectrum(&op, &zs, &levels);
    // σ_min(M − z) never exceeds the distance from z to an eigenvalue.
    let spec = ctx.core("spectral::spectrum", spectrum(&op, ctx.cfg.outlier_tol))?;
    let scale = op.matrix.frobenius_norm();
    let bad = ps
        .points
        .iter()
        .filter(|p| {
            let z = C64::new(p.z_re, p.z_im);
            let dist = spec
                .eigenvalues
                .iter()
                .map(|e| (e - z).norm())
                .fold(f64::INFINITY, f64::min);
            p.sigma_min > dist + 1e-9 * scale
        })
        .count();
    ctx.check(
        "sigma_min <= distance to spectrum",
        bad == 0,
        format!("{bad} violation(s)"),
    );
    let near = ps
        .points
        .iter()
        .map(|p| distance_to_half_line(C64::new(p.z_re, p.z_im)))
        .fold(f64::INFINITY, f64::min);
    log::info!("closest grid point to [0, inf): {near}");
    if ctx.wants(Format::Json) {
        ctx.out.json("pseudospectrum.json", &ps)?;
    }
    if ctx.wants(Format::Csv) {
        let rows: &[PseudoPoint] = &ps.points;
        ctx.out.csv("pseudospectrum.csv", rows)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MultiplierRow<'a> {
    identity_id: &'a str,
    term_name: &'a str,
    value_re: f64,
    value_im: f64,
    residual: f64,
}

#[derive(Serialize)]
struct MultiplierOutput {
    lambda_re: f64,
    lambda_im: f64,
    reports: Vec<IdentityReport>,
    radial_derivative: Vec<RadiReport>,
}

enum Outcome {
    Plain(IdentityReport),
    Radi(String, RadiReport),
}

/// Radial and `ℓ = 1` bumps with complex Gaussian factors.
pub fn default_test_functions(d: usize) -> Result<Vec<(&'static str, TestFunction)>, CoreError> {
    Ok(vec![
        (
            "radial",
            TestFunction::radial_bump(d, 2.0, 6, C64::new(-0.4, 0.3))?,
        ),
        (
            "ell1",
            TestFunction::ell1_bump(d, 2.0, 6, C64::new(-0.3, -0.5))?,
        ),
    ])
}

fn identity_check(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let lambda = cfg.lambda_c64().expect("validated");
    let quad = cfg
        .quadrature
        .map(|q| Quadrature::Radial {
            panels: q.panels,
            q: q.q,
        })
        .unwrap_or_default();
    let tfs = ctx.core(
        "multiplier::TestFunction::radial_bump",
        default_test_functions(cfg.dimension),
    )?;
    let mut jobs = Vec::new();
    for id in cfg.identities() {
        for (family, u) in &tfs {
            jobs.push((id, *family, *u));
        }
    }
    let results: Vec<Result<Outcome, RunError>> = jobs
        .par_iter()
        .map(|(id, family, u)| {
            let wrap = |op: &'static str, r: Result<IdentityReport, CoreError>| {
                ctx.core(op, r).map(|mut rep| {
                    rep.identity_id = format!("{}:{family}", rep.identity_id);
                    Outcome::Plain(rep)
                })
            };
            match id {
                IdentityName::Id1 => wrap(
                    "multiplier::identity_residual_1",
                    identity_residual_1(u, lambda, &Profile::Power { c: 1.0, p: 1.0 }, quad),
                ),
                IdentityName::Id2 => wrap(
                    "multiplier::identity_residual_2",
                    identity_residual_2(u, lambda, &Profile::Power { c: 1.0, p: 1.0 }, quad),
                ),
                IdentityName::Id3 => wrap(
                    "multiplier::identity_residual_3",
                    identity_residual_3(u, lambda, &Profile::Power { c: 1.0, p: 2.0 }, quad),
                ),
                IdentityName::Key => wrap(
                    "multiplier::key_identity_residual",
                    key_identity_residual(u, lambda, quad),
                ),
                IdentityName::CanonicalTriple => wrap(
                    "multiplier::triple_identity",
                    triple_identity(u, lambda, &MultiplierTriple::canonical(lambda), quad),
                ),
                IdentityName::RadialDerivative => ctx
                    .core(
                        "multiplier::radi_identity_terms",
                        radi_identity_terms(u, lambda, v, quad),
                    )
                    .map(|r| Outcome::Radi(format!("radial-derivative:{family}"), r)),
            }
        })
        .collect();

    let mut reports = Vec::new();
    let mut radi = Vec::new();
    let mut rows_owned: Vec<(String, String, f64, f64, f64)> = Vec::new();
    for r in results {
        match r? {
            Outcome::Plain(rep) => {
                for t in &rep.terms {
                    rows_owned.push((
                        rep.identity_id.clone(),
                        t.name.clone(),
                        t.value_re,
                        t.value_im,
                        rep.residual,
                    ));
                }
                for (name, val) in [("lhs", rep.lhs), ("rhs", rep.rhs)] {
                    rows_owned.push((rep.identity_id.clone(), name.into(), val, 0.0, rep.residual));
                }
                reports.push(rep);
            }
            Outcome::Radi(id, rep) => {
                for t in &rep.terms {
                    rows_owned.push((
                        id.clone(),
                        t.name.clone(),
                        t.value_re,
                        t.value_im,
                        rep.residual,
                    ));
                }
                radi.push(rep);
            }
        }
    }
    let worst = reports
        .iter()
        .map(|r| r.residual)
        .chain(radi.iter().map(|r| r.residual))
        .fold(0.0, f64::max);
    ctx.check(
        "identity residuals <= 1e-6",
        worst <= IDENTITY_TOL,
        format!("max residual {worst:e}"),
    );
    if !radi.is_empty() {
        let ok = radi.iter().all(|r| r.chain_holds());
        ctx.check("estimate chain", ok, "applicable steps only");
    }
    if ctx.wants(Format::Json) {
        ctx.out.json(
            "multiplier.json",
            &MultiplierOutput {
                lambda_re: lambda.re,
                lambda_im: lambda.im,
                reports,
                radial_derivative: radi,
            },
        )?;
    }
    if ctx.wants(Format::Csv) {
        let rows: Vec<MultiplierRow<'_>> = rows_owned
            .iter()
            .map(|(id, name, re, im, res)| MultiplierRow {
                identity_id: id,
                term_name: name,
                value_re: *re,
                value_im: *im,
                residual: *res,
            })
            .collect();
        ctx.out.csv("multiplier.csv", &rows)?;
    }
    Ok(())
}

fn singular_sequence(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let phi = ctx
        .core("spectral::BumpProfile::new", BumpProfile::new(3))?
        .normalized();
    let a = subordination_a_pointwise(v);
    let a_used = if a.divergent { 0.0 } else { a.value };
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let n_list = cfg.n_list.clone().expect("validated");
    let rep = ctx.core(
        "spectral::singular_sequence_decay",
        singular_sequence_decay(&phi, k, a_used, &n_list),
    )?;
    if rep.k_norm > 0.0 {
        ctx.check(
            "residual decays at least like 1/n",
            rep.residual_slope <= -1.0 + 0.01,
            format!("slope {}", rep.residual_slope),
        );
    } else {
        ctx.check(
            "residual decays like 1/n^2",
            (rep.residual_slope + 2.0).abs() <= 0.01,
            format!("slope {}", rep.residual_slope),
        );
    }
    if a.divergent {
        ctx.check(
            "potential term",
            true,
            "skipped: the subordination constant is infinite",
        );
    } else if a_used > 0.0 {
        ctx.check(
            "potential term decays like 1/n^2",
            (rep.potential_slope + 2.0).abs() <= 0.01,
            format!("slope {}", rep.potential_slope),
        );
    }
    if ctx.wants(Format::Json) {
        ctx.out.json("singular_sequence.json", &rep)?;
    }
    if ctx.wants(Format::Csv) {
        ctx.out.csv("singular_sequence.csv", &rep.rows)?;
    }
    Ok(())
}

/// Deterministic points in `[−2, 2]³` with `|x| ≥ 0.1` (a Kronecker sequence).
pub fn sample_points(n: usize) -> Vec<Vec<f64>> {
    const ALPHA: [f64; 3] = [
        0.819_172_513_396_164_4,
        0.671_043_606_703_789_2,
        0.549_700_477_901_970_5,
    ];
    let mut out = Vec::with_capacity(n);
    let mut i = 1u64;
    while out.len() < n {
        let x: Vec<f64> = ALPHA
            .iter()
            .map(|a| 4.0 * ((i as f64 * a).fract()) - 2.0)
            .collect();
        if x.iter().map(|t| t * t).sum::<f64>() >= 0.01 {
            out.push(x);
        }
        i += 1;
    }
    out
}

#[derive(Serialize)]
struct MagneticOutput {
    field: MagneticKind,
    max_b_tau: f64,
    max_b_tau_finite_difference: f64,
    report: MagneticReport,
}

fn magnetic_smoke(ctx: &mut Ctx<'_>, v: &Potential) -> Result<(), RunError> {
    let cfg = ctx.cfg;
    let lambda = c64(cfg.lambda.expect("validated"));
    let kind = cfg
        .magnetic
        .unwrap_or(MagneticKind::InverseSquareSwirl { strength: 1.0 });
    let mag = ctx.core(
        "potential::MagneticPotential::new",
        MagneticPotential::new(kind, 3),
    )?;
    let pts = sample_points(cfg.samples.unwrap_or(DEFAULT_SAMPLES));
    let (mut bt, mut bt_fd) = (0.0f64, 0.0f64);
    for x in &pts {
        let a = ctx.core("potential::b_tau", b_tau(&mag, x))?;
        let f = ctx.core(
            "potential::b_tau_finite_difference",
            b_tau_finite_difference(&mag, x, 1e-5),
        )?;
        bt = bt.max(a.iter().map(|t| t.abs()).fold(0.0, f64::max));
        bt_fd = bt_fd.max(f.iter().map(|t| t.abs()).fold(0.0, f64::max));
    }
    let tf = ctx.core(
        "multiplier::TestFunction::ell1_bump",
        TestFunction::ell1_bump(3, 2.0, 6, C64::new(-0.3, -0.5)),
    )?;
    let rep = ctx.core(
        "multiplier::magnetic_identity_smoke",
        magnetic_identity_smoke(&tf, lambda, v, &mag, &pts, Quadrature::default()),
    )?;
    ctx.check(
        "B_tau . x = 0",
        rep.max_b_tau_dot_x <= 1e-10,
        format!("{:e}", rep.max_b_tau_dot_x),
    );
    ctx.check(
        "magnetic identity residual <= 1e-6",
        rep.residual <= IDENTITY_TOL,
        format!("{:e}", rep.residual),
    );
    if matches!(
        kind,
        MagneticKind::InverseSquareSwirl { .. } | MagneticKind::Zero
    ) {
        ctx.check("B_tau = 0 (analytic)", bt <= 1e-10, format!("{bt:e}"));
        ctx.check(
            "B_tau = 0 (finite differences)",
            bt_fd <= 1e-6,
            format!("{bt_fd:e}"),
        );
    }
    ctx.out.json(
        "magnetic.json",
        &MagneticOutput {
            field: kind,
            max_b_tau: bt,
            max_b_tau_finite_difference: bt_fd,
            report: rep,
        },
    )
}
