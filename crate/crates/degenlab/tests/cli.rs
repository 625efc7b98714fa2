//! Black-box tests of the degenlab binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_degenlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn rejects_beta_at_or_above_one() {
    let out = run(&["solve", "--beta", "1.2", "--n", "64"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("beta < 1"), "stderr: {err}");
}

#[test]
fn rejects_out_of_range_n() {
    let out = run(&["solve", "--beta", "0.5", "--n", "8"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[16, 2^22]"));
}

#[test]
fn solve_writes_bundle_with_expected_headers() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--domain",
        "interval",
        "--beta",
        "0.5",
        "--n",
        "128",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mesh = std::fs::read_to_string(dir.path().join("mesh.txt")).unwrap();
    assert!(mesh.starts_with("# mesh n=128 gamma=4 domain=interval"), "{}", &mesh[..60]);
    let field = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    let mut lines = field.lines();
    assert!(lines.next().unwrap().starts_with("# beta=0.5 n=128"));
    assert_eq!(lines.next().unwrap(), "x,u");
    let manifest = json(dir.path(), "manifest.json");
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["files"]["mesh.txt"].as_str().unwrap().len(), 64);
}

#[test]
fn solve_ball_beta_zero_center_matches_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--domain",
        "ball",
        "--N",
        "2",
        "--beta",
        "0",
        "--n",
        "1024",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let center = json(dir.path(), "manifest.json")["u_center"].as_f64().unwrap();
    assert!((center - 0.25).abs() < 1e-4, "center {center}");
}

#[test]
fn config_file_flags_and_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "beta = 0.25\nn = 256\ndomain = interval\n").unwrap();
    let out_dir = dir.path().join("from_env");
    let out = bin()
        .args(["solve", "--config", conf.to_str().unwrap(), "--beta", "0.5"])
        .env("DEGENLAB_OUT", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // the flag overrides the file, the env var supplies the directory
    let manifest = json(&out_dir, "manifest.json");
    assert_eq!(manifest["beta"], 0.5);
    assert_eq!(manifest["n"], 256);
}

#[test]
fn verify_exit_codes_split_real_from_perturbed() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(&["verify", "--beta", "0.5", "--f", "one", "--out", dir.path().to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let report = json(dir.path(), "verify.json");
    assert!(report["order"].as_f64().unwrap() >= 1.8);
    let oracle = std::fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(oracle.starts_with("r,u,beta,N,kind"));

    let bad = run(&["verify", "--beta", "0.5", "--f", "perturbed", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn theorems_sweep_with_jobs_is_deterministic() {
    let once = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "theorems",
            "--betas",
            "0.25,0.5",
            "--n",
            "4096",
            "--jobs",
            "2",
            "--seed",
            seed,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let verdict = json(
            &dir.path().join("interval(0,1)_beta0.5"),
            "boundary-rate.json",
        );
        assert_eq!(verdict["verdict"], "pass");
        for key in ["theorem", "beta", "domain", "estimate", "window", "verdict", "tolerances"] {
            assert!(verdict.get(key).is_some(), "missing {key}");
        }
        std::fs::read_to_string(dir.path().join("summary.json")).unwrap()
    };
    assert_eq!(once("42"), once("42"));
}

#[test]
fn a2_subcommand_reports_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "a2",
        "--betas",
        "-1.5,-0.5,0,0.9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = std::fs::read_to_string(dir.path().join("a2_table.csv")).unwrap();
    assert!(table.contains("-1.5,false,inf"));
    assert!(table.contains("0,true,1"));
}
