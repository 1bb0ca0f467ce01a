use nisq_modal::matrix::DenseMatrix;
use nisq_modal::oscillator::OscillatorSystem;
use serde_json::Value;

use crate::run_with;

struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

fn nisq_env(args: &[&str], seed_env: Option<&str>) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nisq-modal").chain(args.iter().copied());
    let code = run_with(argv, seed_env, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn nisq(args: &[&str]) -> Outcome {
    nisq_env(args, None)
}

fn ok(args: &[&str]) -> String {
    let out = nisq(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn fails(args: &[&str], code: u8, kind: &str) -> String {
    let out = nisq(args);
    assert_eq!(out.code, code, "{args:?}");
    assert!(out.stdout.is_empty());
    assert_eq!(out.stderr.lines().count(), 1, "{}", out.stderr);
    assert!(out.stderr.starts_with(&format!("error[{kind}]: ")), "{}", out.stderr);
    out.stderr
}

#[test]
fn model_chain_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["model", "chain:2", "--out", dir.path().to_str().unwrap()]);
    assert!(
        out.lines()
            .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["eigenvalues", "1", "3"]),
        "{out}"
    );
    let text = std::fs::read_to_string(dir.path().join("chain_2_fixed_fixed.matrix.txt")).unwrap();
    let m = DenseMatrix::from_text(&text).unwrap();
    assert_eq!(m, DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap());
}

#[test]
fn model_blade_a() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["model", "blade:a:10", "--out", dir.path().to_str().unwrap()]);
    assert!(out.contains("n_qubits     4"), "{out}");
    let js = std::fs::read_to_string(dir.path().join("blade_a_10.geometry.json")).unwrap();
    assert_eq!(OscillatorSystem::from_json(&js).unwrap().len(), 12);
}

#[test]
fn bad_selectors_are_usage_errors() {
    fails(&["model", "chain:1"], 2, "usage");
    fails(&["estimate", "blade:q"], 2, "usage");
    fails(&["estimate", "blade:a:99"], 2, "usage");
    fails(&["estimate", "chain:4", "--shots", "0"], 2, "usage");
    fails(&["estimate", "chain:4", "--noise", "1.5"], 2, "usage");
    fails(&["sweep", "--format", "text"], 2, "usage");
    fails(&["--jobs", "0", "sweep"], 2, "usage");
    fails(&["frobnicate"], 2, "usage");
    fails(&[], 2, "usage");
}

#[test]
fn estimate_noiseless_is_exact() {
    let v = json(&[
        "estimate", "chain:2", "--noise", "1.0", "--shots", "analytic", "--format", "json",
    ]);
    assert!(v["rel_error"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(v["n_qubits"], 1);
    let text = ok(&["estimate", "chain:2", "--noise", "1.0", "--shots", "analytic"]);
    for key in ["lambda_exact", "lambda_est", "omega_est", "rel_error", "gate_count"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "{key} missing: {text}");
    }
}

#[test]
fn estimate_follows_noise_law() {
    for g in ["chain:2", "chain:16", "blade:b:30"] {
        let v = json(&[
            "estimate", g, "--noise", "0.993", "--shots", "analytic", "--format", "json",
        ]);
        let gates = v["gate_count"].as_i64().unwrap() as i32;
        let expect = 1.0 - 0.993f64.powi(gates);
        assert!((v["rel_error"].as_f64().unwrap() - expect).abs() < 1e-9, "{g}");
    }
}

#[test]
fn estimate_k_selects_eigenpair() {
    let v = json(&[
        "estimate", "chain:4", "--k", "0", "--noise", "1", "--shots", "analytic", "--format", "json",
    ]);
    let s = (std::f64::consts::PI / 10.0).sin();
    assert!((v["lambda_exact"].as_f64().unwrap() - 4.0 * s * s).abs() < 1e-12);
    fails(&["estimate", "chain:4", "--k", "4"], 1, "argument");
}

#[test]
fn estimate_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/est.json");
    let args = ["estimate", "chain:8", "--seed", "3", "--out", path.to_str().unwrap()];
    ok(&args);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file, json(&["estimate", "chain:8", "--seed", "3", "--format", "json"]));
    assert_eq!(file["shots_per_term"], 4096);
}

#[test]
fn seed_env_fallback_and_override() {
    let base = ["estimate", "chain:8", "--shots", "64", "--format", "json"];
    let with_env = |seed: &str, extra: &[&str]| {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        let out = nisq_env(&args, Some(seed));
        assert_eq!(out.code, 0);
        out.stdout
    };
    let flag = ok(&[&base[..], &["--seed", "7"]].concat());
    assert_eq!(with_env("7", &[]), flag);
    assert_eq!(with_env("8", &["--seed", "7"]), flag);
    assert_ne!(with_env("8", &[]), flag);
    assert_eq!(nisq_env(&base, Some("seven")).code, 2);
}

#[test]
fn help_goes_to_stdout() {
    let out = nisq(&["--help"]);
    assert_eq!(out.code, 0);
    for sub in ["model", "estimate", "sweep", "assess"] {
        assert!(out.stdout.contains(sub));
    }
    let out = nisq(&["sweep", "--help"]);
    assert!(out.stdout.contains("[default: 100]") && out.stdout.contains("NISQ_MODAL_SEED"));
}

#[test]
fn default_sweep_covers_ladder() {
    let csv = ok(&["sweep", "--shots", "analytic", "--repetitions", "1"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), nisq_modal::estimator::SWEEP_CSV_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 9);
    assert_eq!(rows.iter().filter(|r| r.starts_with("chain:")).count(), 6);
    for p in ["blade:a:", "blade:b:", "blade:c:"] {
        assert!(rows.iter().any(|r| r.starts_with(p)));
    }
}

#[test]
fn noiseless_sweep_has_zero_error() {
    let v = json(&[
        "sweep",
        "chain:4",
        "blade:a:20",
        "--noise",
        "1.0",
        "--shots",
        "analytic",
        "--repetitions",
        "2",
        "--format",
        "json",
    ]);
    for row in v.as_array().unwrap() {
        assert!(row["rel_err_mean"].as_f64().unwrap().abs() < 1e-9);
        assert_eq!(row["shots"], 0);
    }
}

#[test]
fn sweep_family_repetition_flags() {
    let args = [
        "sweep",
        "chain:4",
        "blade:a:10",
        "--shots",
        "32",
        "--chain-repetitions",
        "3",
        "--blade-repetitions",
        "1",
        "--format",
        "json",
    ];
    let v = json(&args);
    let blade = v
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["geometry"] == "blade:a:10")
        .unwrap();
    assert_eq!(blade["rel_err_std"], 0.0);
    let chain = v
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["geometry"] == "chain:4:fixed_fixed")
        .unwrap();
    assert!(chain["rel_err_std"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_out_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let base = [
        "sweep",
        "chain:2",
        "chain:4",
        "--repetitions",
        "4",
        "--shots",
        "100",
        "--seed",
        "2",
    ];
    let stdout = ok(&base);
    let mut with_out = base.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let msg = ok(&with_out);
    assert!(msg.starts_with("wrote 2 rows"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn assess_torino_chain64_is_infeasible() {
    let v = json(&[
        "assess",
        "--device",
        "ibm_torino",
        "--from-geometry",
        "chain:64",
        "--format",
        "json",
    ]);
    assert_eq!(v["suitable"]["value"], true);
    assert_eq!(v["classical_alternative_preferred"]["value"], false);
    assert_eq!(v["feasible"]["evaluated"], true);
    assert_eq!(v["feasible"]["value"], false);
    assert_eq!(v["gate_budget"], 86);
    let text = ok(&["assess", "--device", "ibm_torino", "--from-geometry", "chain:64"]);
    assert!(text.contains("infeasible on ibm_torino"), "{text}");
}

#[test]
fn assess_other_paths() {
    fails(
        &["assess", "--device", "ibm_nairobi", "--from-geometry", "chain:64"],
        1,
        "insufficient-data",
    );
    let err = fails(
        &["assess", "--device", "nosuchdevice", "--from-geometry", "chain:2"],
        1,
        "lookup",
    );
    assert!(err.contains("ibm_torino"));
    fails(&["assess", "--device", "ibm_torino"], 2, "usage");

    let v = json(&[
        "assess",
        "--device",
        "ibm_torino",
        "--system-size",
        "4",
        "--gates",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(v["feasible"]["value"], true);
    let v = json(&[
        "assess",
        "--device",
        "ibm_torino",
        "--from-geometry",
        "chain:8",
        "--parallel",
        "--format",
        "json",
    ]);
    assert_eq!(v["classical_alternative_preferred"]["value"], true);
    assert_eq!(v["feasible"]["evaluated"], false);
    let v = json(&[
        "assess",
        "--device",
        "ibm_torino",
        "--from-geometry",
        "chain:8",
        "--steps",
        "10",
        "--format",
        "json",
    ]);
    assert_eq!(v["suitable"]["value"], false);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"subcommand":"estimate","geometry":"chain:2","noise":1.0,"shots":"analytic","format":"json"}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let v = json(&["--config", cfg]);
    assert!(v["rel_error"].as_f64().unwrap().abs() < 1e-12);
    let v = json(&["estimate", "chain:4", "--config", cfg, "--noise", "0.99"]);
    assert_eq!(v["geometry"], "chain:4:fixed_fixed");
    assert_eq!(v["gate_fidelity"], 0.99);

    std::fs::write(&path, r#"{"subcommand":"estimate","shotz":3}"#).unwrap();
    fails(&["--config", cfg], 2, "usage");
}
