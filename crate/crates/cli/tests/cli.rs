use std::path::Path;
use std::process::{Command, Output};

use darboux_core::io::{read_seq_csv, OperatorFile, RunReport};
use darboux_core::models::{laplacian, oscillator_model, FreeParticleModel};
use darboux_core::{DarbouxOperator, TransformOptions};
use tempfile::tempdir;

fn darboux(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn report(path: &Path) -> RunReport {
    serde_json::from_reader(std::fs::File::open(path).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

#[test]
fn verify_on_laplacian_passes() {
    let dir = tempdir().unwrap();
    let op = dir.path().join("lap.json");
    OperatorFile::from_jacobi(&laplacian(64)).save(&op).unwrap();
    let out = darboux(&["verify", "--input", op.to_str().unwrap(), "--lambda", "-2.5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&dir.path().join("verify.json"));
    assert!(rep.passed);
    assert!(rep.r_int.unwrap() < 1e-10);
    assert!(rep.r_fac0.unwrap() < 1e-10 && rep.r_fac1.unwrap() < 1e-10);
    assert_eq!(rep.boundary_rows_excluded, vec![62, 63]);
}

#[test]
fn residual_over_tolerance_exits_one() {
    let dir = tempdir().unwrap();
    let args = ["verify", "--n", "32", "--lambda", "-2.5", "--tol-verify", "1e-30"];
    let out = darboux(&args, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["status"], "failed");
    assert_eq!(err["reason"], "residual exceeds tolerance");
    let rep = report(&dir.path().join("verify.json"));
    assert!(!rep.passed);
    // same inputs, same report
    let again = darboux(&args, dir.path());
    assert_eq!(again.status.code(), Some(1));
    assert_eq!(report(&dir.path().join("verify.json")), rep);
}

#[test]
fn seed_with_a_zero_is_rejected() {
    let dir = tempdir().unwrap();
    let seed = dir.path().join("seed.csv");
    std::fs::write(&seed, "n,re,im\n0,1,0\n1,0,0\n2,1,0\n3,2,0\n").unwrap();
    let out = darboux(&["transform", "--n", "4", "--seed", seed.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["status"], "error");
    assert!(err["reason"].as_str().unwrap().contains("seed not nodeless"));
}

#[test]
fn invalid_operator_file_is_an_error() {
    let dir = tempdir().unwrap();
    let op = dir.path().join("bad.json");
    std::fs::write(&op, r#"{"schema_version":1,"label":"x","n_sites":2,"a":[0.1,1.0],"q":[0.0,0.0]}"#).unwrap();
    let out = darboux(&["verify", "--input", op.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["reason"].as_str().unwrap().contains("a[0] must be 0"));
}

#[test]
fn transform_writes_operator_and_darboux_files() {
    let dir = tempdir().unwrap();
    let out = darboux(&["transform", "--n", "40", "--lambda", "-2.5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let h1 = OperatorFile::load(&dir.path().join("transformed.json")).unwrap().to_jacobi().unwrap();
    assert_eq!(h1.n_sites(), 40);
    let rep = report(&dir.path().join("report.json"));
    assert!(rep.q_tilde_crosscheck.unwrap() < 1e-10);
    assert!(rep.r_int.unwrap() < 1e-10);

    // export reproduces the stored coefficients bit for bit
    let l_path = dir.path().join("darboux.json");
    let l: DarbouxOperator = serde_json::from_reader(std::fs::File::open(&l_path).unwrap()).unwrap();
    let ex = dir.path().join("export");
    let out = darboux(&["export", "--input", l_path.to_str().unwrap()], &ex);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_seq_csv(&ex.join("a_coef.csv")).unwrap().values, l.a_coef());
    assert_eq!(read_seq_csv(&ex.join("b_coef.csv")).unwrap().values, l.b_coef());
    assert!(ex.join("seed.csv").exists());
}

#[test]
fn step2_transform_uses_the_hermite_seed() {
    let dir = tempdir().unwrap();
    let op = dir.path().join("osc.json");
    OperatorFile::from_step2(&oscillator_model(48).unwrap()).save(&op).unwrap();
    let out = darboux(&["transform", "--input", op.to_str().unwrap(), "--lambda", "-1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let h1 = OperatorFile::load(&dir.path().join("transformed.json")).unwrap();
    assert_eq!(h1.step, 2);
    assert_eq!(h1.n_sites, 48);
    assert!(dir.path().join("darboux_even.json").exists());
    assert!(dir.path().join("darboux_odd.json").exists());
}

#[test]
fn susy_check_passes() {
    let dir = tempdir().unwrap();
    let out = darboux(&["susy-check", "--n", "12", "--lambda", "-2.5", "--probes", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&dir.path().join("susy.json"));
    assert_eq!(rep.r_nilp, Some(0.0));
    assert!(rep.r_anti.unwrap() < 1e-10 && rep.r_comm.unwrap() < 1e-10);
    assert!(rep.r_int.is_none());
}

#[test]
fn free_particle_model_outputs() {
    let dir = tempdir().unwrap();
    let out = darboux(&["model-free-particle", "--lambda", "-1", "--n", "64"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_seq_csv(&dir.path().join("r.csv")).unwrap();
    assert_eq!(r.len(), 64);
    assert!((r.values[0].re - 0.1).abs() < 1e-12);

    // CSV values are the in-process values, bit for bit
    let model = FreeParticleModel::build(-1.0, 64, &TransformOptions::default()).unwrap();
    let d = read_seq_csv(&dir.path().join("d.csv")).unwrap();
    assert!(d.values.iter().zip(&model.potential.d).all(|(x, y)| x.re == *y && x.im == 0.0));
    assert!(r.values.iter().zip(&model.potential.r).all(|(x, y)| x.re == *y));

    for name in ["a_tilde", "q_tilde", "eta", "eta_hat"] {
        assert_eq!(read_seq_csv(&dir.path().join(format!("{name}.csv"))).unwrap().len(), 64, "{name}");
    }
    let h = OperatorFile::load(&dir.path().join("model.json")).unwrap().to_step2().unwrap();
    assert_eq!(h, model.hamiltonian().unwrap());
}

#[test]
fn json_format_for_sequences() {
    let dir = tempdir().unwrap();
    let out = darboux(&["model-free-particle", "--n", "16", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r: darboux_core::Seq = serde_json::from_reader(std::fs::File::open(dir.path().join("r.json")).unwrap()).unwrap();
    assert!((r.values[0].re - 0.1).abs() < 1e-12);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"lambda": -3.0, "n_sites": 20, "probe_count": 2}"#).unwrap();
    let out = darboux(&["verify", "--config", cfg.to_str().unwrap(), "--n", "24"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&dir.path().join("verify.json"));
    assert_eq!(rep.lambda, -3.0);
    assert_eq!(rep.n_sites, 24);

    std::fs::write(&cfg, r#"{"tolerances": {"verify": 0.0}}"#).unwrap();
    let out = darboux(&["verify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn asymptotics_reports_fits() {
    let dir = tempdir().unwrap();
    let out = darboux(&["asymptotics", "--lambda", "-1", "--n", "2000"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_reader(std::fs::File::open(dir.path().join("asymptotics.json")).unwrap()).unwrap();
    assert_eq!(v["fit_min"], 400);
    let stretched = v["eta"]["stretched"]["even"]["slope"].as_f64().unwrap();
    assert!((stretched + 2.0).abs() < 0.1, "{stretched}");
    let stretched_hat = v["eta_hat"]["stretched"]["odd"]["slope"].as_f64().unwrap();
    assert!((stretched_hat - 2.0).abs() < 0.1, "{stretched_hat}");
}
