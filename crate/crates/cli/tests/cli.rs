use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn specsum(args: &[&str]) -> Output {
    specsum_env(args, None)
}

fn specsum_env(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_specsum"));
    cmd.args(args).env_remove("SPECSUM_THREADS");
    if let Some(t) = threads {
        cmd.env("SPECSUM_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn gen_matrix(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["gen", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = specsum(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_matrix_and_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = gen_matrix(dir.path(), "a.mtx", &["--n", "64", "--kappa", "10", "--profile", "log-uniform", "--norm", "0.5", "--seed", "1"]);
    let car: Value = serde_json::from_str(&std::fs::read_to_string(mtx.with_extension("json")).unwrap()).unwrap();
    let eig: Vec<f64> = car["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(eig.len(), 64);
    let logdet: f64 = eig.iter().map(|l| l.ln()).sum();
    assert!((car["exact"]["logdet"].as_f64().unwrap() - logdet).abs() < 1e-10);
    assert!((car["kappa"].as_f64().unwrap() - 10.0).abs() < 1e-8);
    assert!((car["spectral_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    // the .mtx round-trips to the same spectrum
    let a = specsum_core::mtx::load_matrix_market(&mtx).unwrap();
    let back: f64 = a.spectral().unwrap().eigenvalues.iter().map(|l| l.ln()).sum();
    assert!((back - logdet).abs() < 1e-9);
}

#[test]
fn gen_flat_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = gen_matrix(dir.path(), "flat.mtx", &["--n", "4", "--kappa", "1", "--norm", "0.5"]);
    let car: Value = serde_json::from_str(&std::fs::read_to_string(mtx.with_extension("json")).unwrap()).unwrap();
    for v in car["eigenvalues"].as_array().unwrap() {
        assert_eq!(v.as_f64().unwrap(), 0.5);
    }
    assert!((car["exact"]["logdet"].as_f64().unwrap() - 4.0 * 0.5f64.ln()).abs() < 1e-14);
}

#[test]
fn gen_rejects_malformed_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.mtx");
    for args in [
        vec!["gen", "--n", "1", "--kappa", "10", "--out", p(&out)],
        vec!["gen", "--n", "8", "--kappa", "0.5", "--out", p(&out)],
        vec!["gen", "--n", "8", "--kappa", "10", "--norm", "2", "--out", p(&out)],
        vec!["gen", "--n", "eight", "--kappa", "10", "--out", p(&out)],
    ] {
        let o = specsum(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert!(!out.exists());
}

#[test]
fn estimate_passes_and_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = gen_matrix(dir.path(), "a.mtx", &["--n", "64", "--kappa", "10", "--seed", "1"]);
    let report = dir.path().join("r.json");
    let o = specsum(&["estimate", "--matrix", p(&mtx), "--algorithm", "logdet-svt", "--eps", "0.1", "--output", p(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["within_guarantee"], Value::Bool(true));
    let car: Value = serde_json::from_str(&std::fs::read_to_string(mtx.with_extension("json")).unwrap()).unwrap();
    let exact = car["exact"]["logdet"].as_f64().unwrap();
    assert!((v["exact"].as_f64().unwrap() - exact).abs() < 1e-10);
    assert!((v["estimate"]["value"].as_f64().unwrap() - exact).abs() <= v["guarantee_bound"].as_f64().unwrap());

    let validator = jsonschema::validator_for(&schema()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn every_algorithm_report_matches_schema() {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let cases: [(&str, &[&str]); 9] = [
        ("logdet-sve", &[]),
        ("logdet-taylor", &[]),
        ("logdet-chebyshev", &[]),
        ("logdet-qmc", &[]),
        ("schatten-p", &["--p", "3"]),
        ("trace-inverse", &[]),
        ("vn-entropy", &["--unit-trace"]),
        ("classical-logdet-taylor", &["--probes", "50"]),
        ("classical-schatten-p", &["--p", "2", "--probes", "50"]),
    ];
    for (alg, extra) in cases {
        let mut args = vec!["estimate", "--n", "16", "--kappa", "5", "--algorithm", alg, "--mode", "stochastic", "--eps", "0.2"];
        args.extend_from_slice(extra);
        let o = specsum(&args);
        assert!(code(&o) <= 1, "{alg}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{alg}: {errors:?}");
    }
}

#[test]
fn entropy_needs_unit_trace() {
    let o = specsum(&["estimate", "--n", "16", "--kappa", "5", "--algorithm", "vn-entropy"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unit trace"));
}

#[test]
fn unknown_algorithm_is_usage_error() {
    let o = specsum(&["estimate", "--n", "16", "--kappa", "5", "--algorithm", "logdet-magic"]);
    assert_eq!(code(&o), 2);
    let o = specsum(&["estimate", "--n", "16", "--kappa", "5", "--algorithm", "logdet-svt", "--eps", "1.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn same_seed_gives_identical_bytes_across_thread_counts() {
    for alg in ["logdet-svt", "logdet-qmc", "classical-trace-inverse"] {
        let args = ["estimate", "--n", "40", "--kappa", "8", "--algorithm", alg, "--mode", "stochastic", "--seed", "9", "--probes", "200"];
        let first = stdout(&specsum_env(&args, Some("1")));
        assert!(!first.is_empty());
        for t in ["1", "3", "8"] {
            assert_eq!(stdout(&specsum_env(&args, Some(t))), first, "{alg} threads={t}");
        }
    }
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = specsum_env(&["verify", "--suite", "lemmas"], Some("lots"));
    assert_eq!(code(&o), 2);
}

#[test]
fn manifest_and_flags_agree() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run.json");
    std::fs::write(
        &manifest,
        r#"{"command":"estimate",
            "matrix_source":{"generator":{"n":24,"kappa":6,"profile":"log-uniform","norm":0.5,"seed":3}},
            "algorithm":{"algorithm":{"name":"trace_inverse"},"eps":0.1,"delta":0.1,"mode":"exact","seed":4},
            "format":"json"}"#,
    )
    .unwrap();
    let a = specsum(&["estimate", "--manifest", p(&manifest)]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = specsum(&["estimate", "--n", "24", "--kappa", "6", "--gen-seed", "3", "--algorithm", "trace-inverse", "--seed", "4"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn csv_estimate_has_stable_header() {
    let o = specsum(&["estimate", "--n", "16", "--kappa", "5", "--algorithm", "schatten-p", "--p", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "axis,value,seed,algorithm,n,eps,delta,mode,estimate,exact,error,guarantee,guarantee_eps,guarantee_bound,\
         within_guarantee,queries,soft_queries,polylog_factor,ae_rounds,shots,sve_calls,matvecs,repetitions,failed"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[3], "schatten-p2");
    assert_eq!(row[14], "true");
    // 17 significant digits
    assert_eq!(row[8].split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn exact_cap_withholds_oracle() {
    let o = specsum(&["estimate", "--n", "16", "--kappa", "5", "--algorithm", "logdet-svt", "--exact-cap", "8"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["exact"].is_null() && v["within_guarantee"].is_null());
    assert!(v["guarantee_bound"].as_f64().unwrap() > 0.0);
}

fn sweep_fit(args: &[&str]) -> (Value, Vec<Vec<String>>) {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("s.csv");
    let fit_path = dir.path().join("fit.json");
    let mut all = vec!["sweep", "--output", p(&csv_path), "--fit-output", p(&fit_path)];
    all.extend_from_slice(args);
    let o = specsum(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fit: Value = serde_json::from_str(&std::fs::read_to_string(&fit_path).unwrap()).unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (fit, rows)
}

#[test]
fn eps_sweep_on_logdet_svt() {
    let (fit, rows) = sweep_fit(&[
        "--axis", "eps", "--values", "0.025,0.2,0.05,0.1", "--seeds", "2,1", "--algorithm", "logdet-svt", "--n", "32", "--kappa", "10",
    ]);
    let slope = fit["soft_queries"]["slope"].as_f64().unwrap();
    assert!((0.85..=1.15).contains(&slope), "{slope}");
    assert_eq!(fit["soft_queries"]["points"], 8);
    // canonical order: axis value, then seed
    let keys: Vec<(f64, u64)> = rows.iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    assert_eq!(keys, vec![(0.025, 1), (0.025, 2), (0.05, 1), (0.05, 2), (0.1, 1), (0.1, 2), (0.2, 1), (0.2, 2)]);
    assert!(rows.iter().all(|r| r[14] == "true"));
}

#[test]
fn kappa_sweep_on_logdet_sve() {
    let (fit, _) = sweep_fit(&["--axis", "kappa", "--values", "5,10,20,40", "--algorithm", "logdet-sve", "--n", "32", "--kappa", "10"]);
    let slope = fit["soft_queries"]["slope"].as_f64().unwrap();
    assert!((2.6..=3.4).contains(&slope), "{slope}");
}

#[test]
fn p_sweep_changes_the_order() {
    let (_, rows) = sweep_fit(&["--axis", "p", "--values", "1,2,3", "--algorithm", "schatten-p", "--p", "1", "--n", "16", "--kappa", "5"]);
    let names: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(names, ["schatten-p1", "schatten-p2", "schatten-p3"]);
}

#[test]
fn single_value_sweep_is_insufficient() {
    let (fit, rows) = sweep_fit(&["--axis", "eps", "--values", "0.1", "--algorithm", "logdet-svt", "--n", "16", "--kappa", "5"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(fit["queries"]["status"], "insufficient points");
    assert!(fit["queries"]["slope"].is_null());
}

#[test]
fn sweep_usage_errors() {
    let o = specsum(&["sweep", "--axis", "eps", "--algorithm", "logdet-svt", "--n", "16", "--kappa", "5"]);
    assert_eq!(code(&o), 2);
    let dir = tempfile::tempdir().unwrap();
    let mtx = gen_matrix(dir.path(), "a.mtx", &["--n", "8", "--kappa", "4"]);
    let o = specsum(&["sweep", "--axis", "kappa", "--values", "4,8", "--algorithm", "logdet-svt", "--matrix", p(&mtx)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("generated matrix"));
}

#[test]
fn verify_lemmas_suite() {
    let o = specsum(&["verify", "--suite", "lemmas"]);
    let text = stdout(&o);
    assert_eq!(code(&o), 0, "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("[PASS]")).count(), 4);
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let o = specsum(&["verify", "--suite", "bogus"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn inputs_are_not_modified() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = gen_matrix(dir.path(), "a.mtx", &["--n", "16", "--kappa", "5"]);
    let before = std::fs::read(&mtx).unwrap();
    let o = specsum(&["estimate", "--matrix", p(&mtx), "--algorithm", "logdet-taylor"]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&mtx).unwrap(), before);
}
