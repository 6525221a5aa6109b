use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spectra_cert::{parse_config, RunManifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectra-cert"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run_in(dir: &Path, cfg: &Path, extra: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .arg("run")
        .arg(cfg)
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const CONDITIONS: &str = r#"{"experiment":"check-conditions","potential":{"name":"hardy","params":{"a":0.5}},"dimension":3,"output":{"path":"out"}}"#;

const WELL: &str = r#"{"experiment":"spectrum","potential":{"name":"square_well","params":{"v0":9.869604401089358,"r0":1.0}},
  "dimension":3,"output":{"path":"out","formats":["json","csv"]}}"#;

#[test]
fn conditions_for_hardy_pass_thm11() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", CONDITIONS);
    let o = run_in(dir.path(), &cfg, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/conditions.json")).unwrap()).unwrap();
    assert_eq!(rep["verdicts"]["thm11"], "pass");
    assert_eq!(rep["potential"], "hardy");
    assert!(rep.get("Λ").is_some());
}

#[test]
fn square_well_spectrum_has_one_outlier_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", WELL);
    let o = run_in(dir.path(), &cfg, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("out/spectrum.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["re", "im", "residual", "is_outlier"]
    );
    let outliers: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[3] == "true")
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(outliers.len(), 1);
    assert!(outliers[0] < 0.0);
}

#[test]
fn canonical_triple_residuals_are_small() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "i.json",
        r#"{"experiment":"identity-check","potential":{"name":"zero"},"dimension":3,"lambda":[1.0,1.0],
            "identities":["canonical-triple"],"output":{"path":"out","formats":["csv"]}}"#,
    );
    let o = run_in(dir.path(), &cfg, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("out/multiplier.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec![
            "identity_id",
            "term_name",
            "value_re",
            "value_im",
            "residual"
        ]
    );
    let mut n = 0;
    for r in rdr.records() {
        let r = r.unwrap();
        assert!(r[0].starts_with("triple:"));
        let res: f64 = r[4].parse().unwrap();
        assert!(res <= 1e-6, "{res}");
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn identical_configs_give_identical_reports() {
    for body in [CONDITIONS, WELL] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "c.json", body);
        assert_eq!(
            code(&run_in(dir.path(), &cfg, &["--set", "output.path=a"])),
            0
        );
        assert_eq!(
            code(&run_in(dir.path(), &cfg, &["--set", "output.path=b"])),
            0
        );
        let ma: RunManifest =
            serde_json::from_slice(&fs::read(dir.path().join("a/manifest.json")).unwrap()).unwrap();
        let mb: RunManifest =
            serde_json::from_slice(&fs::read(dir.path().join("b/manifest.json")).unwrap()).unwrap();
        assert!(!ma.files.is_empty());
        for (fa, fb) in ma.files.iter().zip(&mb.files) {
            assert_eq!(fa.path, fb.path);
            let a = fs::read(dir.path().join("a").join(&fa.path)).unwrap();
            let b = fs::read(dir.path().join("b").join(&fb.path)).unwrap();
            assert_eq!(a, b, "{}", fa.path);
            assert_eq!(fa.sha256, fb.sha256);
        }
        ma.verify(&dir.path().join("a")).unwrap();
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "b.json",
        r#"{"experiment":"bs-norm","potential":{"name":"hardy","params":{"a":0.5}},"dimension":4,"z_list":[[-1,0]]}"#,
    );
    let o = run_in(dir.path(), &cfg, &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bs-norm requires dimension 3"));

    let cfg = write_config(
        dir.path(),
        "m.json",
        r#"{"experiment":"check-conditions","dimension":3}"#,
    );
    let o = run_in(dir.path(), &cfg, &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("potential"));

    let o = run_in(dir.path(), &dir.path().join("missing.json"), &[]);
    assert_eq!(code(&o), 2);
}

#[test]
fn numerical_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // Two panels of a two-point rule cannot resolve the identity integrals.
    let cfg = write_config(
        dir.path(),
        "q.json",
        r#"{"experiment":"identity-check","potential":{"name":"zero"},"dimension":3,"lambda":[1.0,1.0],
            "identities":["key"],"quadrature":{"panels":2,"q":2},"output":{"path":"out"}}"#,
    );
    let o = run_in(dir.path(), &cfg, &[]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("key_identity_residual"));
}

#[test]
fn validate_round_trips_and_applies_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", CONDITIONS);
    let o = bin()
        .args(["validate"])
        .arg(&cfg)
        .args(["--set", "grid_n=64", "--set", "potential.params.a=0.3"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let parsed = parse_config(&text).unwrap();
    assert_eq!(parsed.grid_n, 64);
    assert_eq!(parsed.potential.params["a"], 0.3);
    assert_eq!(parsed.r_max, 40.0);
    let again = serde_json::to_string(&parsed).unwrap();
    assert_eq!(parse_config(&again).unwrap(), parsed);
}

#[test]
fn catalog_lists_potentials_and_thresholds() {
    let o = bin().args(["catalog", "--dim", "3"]).output().unwrap();
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["thresholds"]["thm12_b_max_num"], 1);
    assert_eq!(v["thresholds"]["thm12_b_max_den"], 7);
    assert_eq!(v["potentials"].as_array().unwrap().len(), 7);
    let o = bin().args(["catalog", "--dim", "2"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn thread_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", CONDITIONS);
    let o = bin()
        .current_dir(dir.path())
        .env("SPECTRA_CERT_THREADS", "1")
        .arg("run")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = bin()
        .current_dir(dir.path())
        .env("SPECTRA_CERT_THREADS", "zero")
        .arg("run")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn every_experiment_runs() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        r#"{"experiment":"bs-norm","potential":{"name":"gaussian","params":{"v0":1}},"dimension":3,"grid_n":60,"r_max":10,"ell_max":2,"z_list":[[-1,0],[0,1]],"output":{"path":"o1","formats":["json","csv"]}}"#,
        r#"{"experiment":"hs-identity","potential":{"name":"gaussian","params":{"v0":1}},"dimension":3,"grid_n":120,"r_max":10,"ell_max":8,"output":{"path":"o2"}}"#,
        r#"{"experiment":"pseudospectrum","potential":{"name":"gaussian","params":{"v0":2,"c_im":1}},"dimension":3,"grid_n":40,"r_max":10,"z_window":{"re_min":-2,"re_max":2,"im_min":-1,"im_max":1,"n_re":3,"n_im":3},"output":{"path":"o3","formats":["csv"]}}"#,
        r#"{"experiment":"singular-sequence","potential":{"name":"hardy","params":{"a":0.5}},"dimension":3,"n_list":[2,4,8,16],"k":[0,0,0],"output":{"path":"o4","formats":["csv"]}}"#,
        r#"{"experiment":"magnetic-smoke","potential":{"name":"zero"},"dimension":3,"lambda":[1.0,0.5],"samples":20,"output":{"path":"o5"}}"#,
        r#"{"experiment":"identity-check","potential":{"name":"coulomb_repulsive","params":{"c":0.5}},"dimension":3,"lambda":[1.0,0.5],"identities":["radial-derivative"],"output":{"path":"o6","formats":["json","csv"]}}"#,
        r#"{"experiment":"spectrum","potential":{"name":"square_well","params":{"v0":10,"r0":1}},"dimension":3,"operator":"box","grid_n":8,"box_l":2,"output":{"path":"o7"}}"#,
    ];
    for (i, body) in configs.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("{i}.json"), body);
        let o = run_in(dir.path(), &cfg, &[]);
        assert_eq!(
            code(&o),
            0,
            "{body}\n{}\n{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        );
    }
    assert!(dir.path().join("o3/pseudospectrum.csv").exists());
    assert!(dir.path().join("o4/singular_sequence.csv").exists());
}
