use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn smlb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smlb"))
        .args(args)
        .env("SMLB_THREADS", "1")
        .output()
        .expect("spawn smlb")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("one JSON record on stdout")
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn norm_of_identity_matches_closed_form() {
    let out = smlb(&["norm", "--func", "affine", "--space", "besov", "--s", "0.5", "--p", "2", "--q", "2", "--dx", "2^-11"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let semi = v["seminorm"].as_f64().unwrap();
    assert!((semi / 2f64.sqrt() - 1.0).abs() < 0.03, "{semi}");
    assert_eq!(v["mode"], "global");
}

#[test]
fn lu_intrinsic_is_bit_reproducible() {
    let args = [
        "norm", "--func", "weier:s=0.5,J=10", "--space", "besov", "--s", "0.3", "--p", "2", "--q", "2", "--mode", "lu-intrinsic",
    ];
    let a = smlb(&args);
    let b = smlb(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a)["value"].as_f64().unwrap();
    assert!(v.is_finite() && v > 0.0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&smlb(&["norm", "--func", "affine", "--space", "besov", "--p", "2", "--q", "2"])), 2);
    assert_eq!(code(&smlb(&["norm", "--func", "affine", "--space", "besov", "--s", "1.5", "--p", "2", "--q", "2", "--mode", "lu-intrinsic"])), 2);
    assert_eq!(code(&smlb(&["verify", "--suite", "T99"])), 2);
    assert_eq!(code(&smlb(&["verify", "--dx", "-1"])), 2);
}

#[test]
fn region_outside_domain_exits_three() {
    let out = smlb(&["norm", "--func", "step", "--space", "besov", "--s", "0.5", "--p", "1", "--q", "1", "--region", "7.5,1"]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = smlb(&["gen", "--dx", "2^-9", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let fa = read_dir_bytes(&a);
    assert_eq!(fa.len(), 11);
    assert_eq!(fa, read_dir_bytes(&b));
}

#[test]
fn gen_rejects_coarse_weierstrass_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = smlb(&["gen", "--corpus", "custom", "--func", "w=weier:s=0.5,J=12", "--dx", "2^-8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("too coarse"));
    assert!(!out.exists());
}

#[test]
fn norm_reads_manifest_functions() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    let c = corpus.to_str().unwrap();
    assert_eq!(code(&smlb(&["gen", "--corpus", "custom", "--func", "lin=affine", "--dx", "2^-10", "--out", c])), 0);
    let manifest = corpus.join("manifest.jsonl");
    let out = smlb(&["norm", "--manifest", manifest.to_str().unwrap(), "--func", "lin", "--space", "tl", "--s", "0.5", "--p", "2", "--q", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let semi = json(&out)["seminorm"].as_f64().unwrap();
    assert!((semi / 2f64.sqrt() - 1.0).abs() < 0.03, "{semi}");
}

#[test]
fn corrupted_manifest_is_rejected_before_output() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.jsonl");
    fs::write(&manifest, "{\"id\": \"x\", \"kind\": \n").unwrap();
    let reports = dir.path().join("reports");
    let o = smlb(&["verify", "--suite", "T31", "--manifest", manifest.to_str().unwrap(), "--out", reports.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!reports.exists());
}

#[test]
fn identities_suite_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("r");
    let o = smlb(&["verify", "--suite", "identities", "--format", "csv", "--out", reports.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(reports.join("identities.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["suite", "case", "lhs", "rhs", "ratio", "pass"]);
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert!(rows.len() > 100);
    assert!(rows.iter().all(|r| &r[5] == "true"));
}

#[test]
fn tight_budget_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("r");
    let o = smlb(&[
        "verify", "--suite", "P21", "--budget", "P21=1.0001", "--dx", "2^-9", "--depth", "9", "--no-one-sided", "--out", reports.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let summary = fs::read_to_string(reports.join("summary.txt")).unwrap();
    assert!(summary.contains("FAIL"), "{summary}");
}

#[test]
fn full_verify_passes_with_all_reports() {
    let dir = tempfile::tempdir().unwrap();
    let reports = dir.path().join("r");
    let o = smlb(&["verify", "--suite", "all", "--out", reports.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    let files = read_dir_bytes(&reports);
    assert!(files.len() >= 12, "{} files", files.len());
    assert!(files.iter().any(|(n, _)| n == "summary.txt"));
}
