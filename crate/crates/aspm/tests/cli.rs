//! Integration tests for the `aspm` binary: exit codes, file outputs,
//! and the CSV/JSON contracts.

use std::path::Path;
use std::process::{Command, Output};

fn aspm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aspm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("link.json");
    std::fs::write(
        &path,
        r#"{"m":16,"n_p":128,"n":4,"signaling":"unipolar","detection":"noncoherent","allow_overlap":true}"#,
    )
    .unwrap();
    path
}

fn design_psf_file(dir: &Path) -> std::path::PathBuf {
    let out = aspm(
        &["design-psf", "--length", "256", "--refine-iters", "150", "--out", "psf.json"],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("psf.json")
}

#[test]
fn design_psf_writes_archive_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let psf_path = design_psf_file(dir.path());
    let text = std::fs::read_to_string(&psf_path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["length"], 256);
    assert_eq!(json["taps_g"].as_array().unwrap().len(), 256);
    assert_eq!(json["taps_h"].as_array().unwrap().len(), 256);
    let acf_error = json["design_metadata"]["acf_error"].as_f64().unwrap();
    assert!(acf_error <= 0.02, "acf_error {acf_error}");
}

#[test]
fn design_psf_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // missing --out
    let out = aspm(&["design-psf", "--length", "256"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // below the minimum length
    let out = aspm(
        &["design-psf", "--length", "10", "--out", "x.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_emits_monotone_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = aspm(
        &[
            "analyze", "--mode", "noncoherent", "--M", "16", "--axis", "ebn0-db",
            "--range", "0:14:0.5",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 29);
    let bers: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(bers.windows(2).all(|w| w[1] < w[0]), "not monotone");
}

#[test]
fn analyze_bad_step_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = aspm(
        &[
            "analyze", "--mode", "coherent", "--M", "16", "--axis", "ebn0-db",
            "--range", "0:14:0",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step"));
}

#[test]
fn simulate_same_seed_is_byte_identical_and_flags_starved_points() {
    let dir = tempfile::tempdir().unwrap();
    let psf = design_psf_file(dir.path());
    let cfg = write_config(dir.path());
    let args = [
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--psf",
        psf.to_str().unwrap(),
        "--axis",
        "snr-db",
        "--range",
        "-9:-3:3",
        "--seed",
        "7",
        "--min-errors",
        "60",
        "--max-bits",
        "1e4",
        "--out",
        "a.csv",
    ];
    let out = aspm(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut args2 = args;
    args2[args.len() - 1] = "b.csv";
    let out = aspm(&args2, dir.path());
    assert!(out.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "same command, same seed must be byte-identical");

    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "axis_value,lambda,ebn0_db,snr_db,bits,errors,ber_sim,ci_low,ci_high,ber_analytic,flagged\n"
    ));
    // the deep point (-3 dB, analytic BER ~ 2e-5) cannot reach 60 errors
    // in 1e4 bits and must be flagged, not dropped
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].ends_with("true"), "starved row flagged: {}", rows[2]);
    assert!(rows[0].ends_with("false"), "healthy row unflagged: {}", rows[0]);
}

#[test]
fn simulate_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let psf = design_psf_file(dir.path());
    let bad = dir.path().join("bad.json");
    // noncoherent + bipolar is invalid
    std::fs::write(
        &bad,
        r#"{"m":16,"n_p":128,"n":4,"signaling":"bipolar","detection":"noncoherent"}"#,
    )
    .unwrap();
    let out = aspm(
        &[
            "simulate", "--config", bad.to_str().unwrap(), "--psf", psf.to_str().unwrap(),
            "--axis", "lambda", "--range", "10:20:10",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_on_designed_psf_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let psf = design_psf_file(dir.path());
    let out = aspm(
        &[
            "verify", "--psf", psf.to_str().unwrap(), "--json", "report.json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "verify failed:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let checks = report.as_array().unwrap();
    assert!(checks.len() >= 15);
    assert!(checks.iter().all(|c| c["passed"].as_bool().unwrap()));
}

#[test]
fn verify_fails_on_corrupted_psf() {
    let dir = tempfile::tempdir().unwrap();
    let psf = design_psf_file(dir.path());
    let mut json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&psf).unwrap()).unwrap();
    let zeros = vec![serde_json::json!(0.0); 256];
    json["taps_h"] = serde_json::Value::Array(zeros);
    let corrupted = dir.path().join("corrupted.json");
    std::fs::write(&corrupted, serde_json::to_string(&json).unwrap()).unwrap();

    let out = aspm(&["verify", "--psf", corrupted.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("FAIL shaping.single_sideband"),
        "expected the single-sideband check to fail:\n{stdout}"
    );
}

#[test]
fn unknown_subcommand_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = aspm(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn aspm_threads_env_doesnt_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let psf = design_psf_file(dir.path());
    let cfg = write_config(dir.path());
    let run = |threads: &str, out: &str| {
        let output = Command::new(env!("CARGO_BIN_EXE_aspm"))
            .args([
                "simulate", "--config", cfg.to_str().unwrap(), "--psf", psf.to_str().unwrap(),
                "--axis", "lambda", "--range", "16:24:8", "--seed", "4",
                "--min-errors", "80", "--max-bits", "1e5", "--out", out,
            ])
            .env("ASPM_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .expect("binary runs");
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    };
    run("1", "t1.csv");
    run("6", "t6.csv");
    let a = std::fs::read(dir.path().join("t1.csv")).unwrap();
    let b = std::fs::read(dir.path().join("t6.csv")).unwrap();
    assert_eq!(a, b);
}
