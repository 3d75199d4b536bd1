//! End-to-end CLI contracts: exit codes, file schemas, and the chained
//! reduction pipeline.

use serde_json::Value;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qcorr"))
}

fn write_bell(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("bell.json");
    let half = 0.5;
    let body = serde_json::json!({
        "schema": "v1",
        "dims": [2, 2],
        "matrix": [
            [[half, 0.0], [0.0, 0.0], [0.0, 0.0], [half, 0.0]],
            [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            [[half, 0.0], [0.0, 0.0], [0.0, 0.0], [half, 0.0]]
        ]
    });
    std::fs::write(&path, serde_json::to_vec_pretty(&body).unwrap()).unwrap();
    path
}

fn read_result(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("result.json")).unwrap()).unwrap()
}

#[test]
fn compute_discord_on_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write_bell(dir.path());
    let out = bin()
        .args(["compute", "discord-povm"])
        .arg(&bell)
        .args(["--starts", "6", "--seed", "2"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result = read_result(dir.path());
    let value = result["value"].as_f64().unwrap();
    assert!((value - 1.0).abs() < 1e-4, "discord {value}");
    assert_eq!(result["bound_direction"], "upper");
    assert_eq!(result["schema"], "v1");
    assert!(result["input_digest"].as_str().unwrap().starts_with("sha256:"));
    // full run config embedded
    assert_eq!(result["config"]["starts"], 6);
    assert_eq!(result["config"]["seed"], 2);
}

#[test]
fn malformed_state_exits_2_citing_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // trace 1 but not PSD
    let body = serde_json::json!({
        "schema": "v1",
        "dims": [2, 2],
        "matrix": [
            [[1.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [-0.5, 0.0], [0.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
        ]
    });
    std::fs::write(&path, serde_json::to_vec(&body).unwrap()).unwrap();
    let out = bin()
        .args(["compute", "eof"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("PSD"), "stderr: {stderr}");
}

#[test]
fn compute_eof_on_werner_half_matches_concurrence_value() {
    // closed form: C(W_1/2) = 1/4, E_F = h((1+sqrt(1-C^2))/2)
    let expected = 0.11761887377091781;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("werner05.json");
    let w = 0.5;
    let a = 0.25 * (1.0 - w);
    let body = serde_json::json!({
        "schema": "v1",
        "dims": [2, 2],
        "matrix": [
            [[a, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [a + w / 2.0, 0.0], [-w / 2.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [-w / 2.0, 0.0], [a + w / 2.0, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [a, 0.0]]
        ]
    });
    std::fs::write(&path, serde_json::to_vec(&body).unwrap()).unwrap();
    let out = bin()
        .args(["compute", "eof"])
        .arg(&path)
        .args(["--k", "4", "--starts", "12", "--seed", "3"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value = read_result(dir.path())["value"].as_f64().unwrap();
    assert!((value - expected).abs() < 1e-4, "eof {value} vs oracle {expected}");
}

#[test]
fn random_cc_battery_classifies_classical() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["random", "cc", "--dims", "2", "2", "--count", "1", "--seed", "11"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let classify = bin()
        .args(["classify"])
        .arg(dir.path().join("cc-000.json"))
        .arg("--cc")
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(classify.status.success());
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("classify.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "classical");
    assert_eq!(report["mode"], "cc");
    assert_eq!(report["a_side"]["verdict"], "classical");
    assert_eq!(report["b_side"]["verdict"], "classical");
}

#[test]
fn random_separable_battery_has_zero_eof() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["random", "separable", "--dims", "2", "2", "--terms", "2", "--count", "1", "--seed", "4"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let compute = bin()
        .args(["compute", "eof"])
        .arg(dir.path().join("separable-000.json"))
        .args(["--k", "4", "--starts", "12", "--seed", "1"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(compute.status.success());
    let value = read_result(dir.path())["value"].as_f64().unwrap();
    assert!(value <= 1e-6, "eof {value}");
}

#[test]
fn chained_reduction_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    // rank-2 state battery from the CLI
    assert!(bin()
        .args(["random", "haar-mixed", "--dims", "2", "2", "--rank", "2", "--seed", "21"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let state_path = dir.path().join("haar-mixed-000.json");

    // E_F of the base state
    assert!(bin()
        .args(["compute", "eof"])
        .arg(&state_path)
        .args(["--k", "4", "--starts", "12", "--seed", "5"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let e_f = read_result(dir.path())["value"].as_f64().unwrap();

    // separability instance file
    let state_json: Value =
        serde_json::from_slice(&std::fs::read(&state_path).unwrap()).unwrap();
    let inst = serde_json::json!({
        "kind": "separability", "schema": "v1", "state": state_json, "delta": 0.1
    });
    let inst_path = dir.path().join("sep.json");
    std::fs::write(&inst_path, serde_json::to_vec(&inst).unwrap()).unwrap();

    // sep -> eof
    assert!(bin()
        .args(["reduce", "sep-to-eof"])
        .arg(&inst_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let eof_inst: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("instance.json")).unwrap()).unwrap();
    assert_eq!(eof_inst["kind"], "eof");
    assert_eq!(eof_inst["threshold"], 0.0);
    let gap = eof_inst["gap"].as_f64().unwrap();
    let expected_gap = 0.1f64 * 0.1 / (2448.0 * 4.0 * std::f64::consts::LN_2);
    assert!(((gap - expected_gap) / expected_gap).abs() < 1e-15);
    assert!(eof_inst["provenance"].as_str().unwrap().starts_with("sha256:"));
    let eof_inst_path = dir.path().join("eof.json");
    std::fs::rename(dir.path().join("instance.json"), &eof_inst_path).unwrap();

    // eof -> discord at the rank register (POVM flavor)
    assert!(bin()
        .args(["reduce", "eof-to-discord"])
        .arg(&eof_inst_path)
        .args(["--dim-c", "2", "--measurement-kind", "povm"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let disc_inst: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("instance.json")).unwrap()).unwrap();
    assert_eq!(disc_inst["kind"], "discord");
    // emitted carrier dims (n, dim_c) are recorded in the schema
    assert_eq!(disc_inst["state"]["dims"], serde_json::json!([2, 2]));
    let b = disc_inst["threshold"].as_f64().unwrap();
    let disc_state = dir.path().join("disc_state.json");
    std::fs::write(
        &disc_state,
        serde_json::to_vec_pretty(&disc_inst["state"]).unwrap(),
    )
    .unwrap();
    assert!(bin()
        .args(["compute", "discord-povm"])
        .arg(&disc_state)
        .args(["--starts", "12", "--seed", "6"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let d_p = read_result(dir.path())["value"].as_f64().unwrap();
    // identity: D = E_F + b with a = 0
    assert!(
        (d_p - (e_f + b)).abs() <= 1e-3,
        "discord {d_p} vs E_F + b = {}",
        e_f + b
    );

    // eof -> holevo and the matching identity
    assert!(bin()
        .args(["reduce", "eof-to-holevo"])
        .arg(&eof_inst_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let hol_inst: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("instance.json")).unwrap()).unwrap();
    assert_eq!(hol_inst["kind"], "holevo");
    let c = hol_inst["threshold"].as_f64().unwrap();
    let chan_path = dir.path().join("chan.json");
    let in_path = dir.path().join("chan_input.json");
    std::fs::write(&chan_path, serde_json::to_vec_pretty(&hol_inst["channel"]).unwrap()).unwrap();
    std::fs::write(
        &in_path,
        serde_json::to_vec_pretty(&hol_inst["input_state"]).unwrap(),
    )
    .unwrap();
    assert!(bin()
        .args(["compute", "constrained-holevo"])
        .arg(&chan_path)
        .arg("--input-state")
        .arg(&in_path)
        .args(["--starts", "12", "--seed", "7"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap()
        .status
        .success());
    let chi = read_result(dir.path())["value"].as_f64().unwrap();
    // with a = 0 the threshold is S(Phi(rho)), so chi = c - E_F
    assert!(
        (chi - (c - e_f)).abs() <= 1e-3,
        "chi {chi} vs c - E_F = {}",
        c - e_f
    );
}

#[test]
fn verify_writes_reports_and_row_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "steering-completeness", "--count", "9", "--seed", "2"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["count"], 9);
    let csv = std::fs::read_to_string(dir.path().join("cases.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10, "header + 9 rows");
    // unknown suite name exits 2
    let bad = bin()
        .args(["verify", "unknown-name"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_inequality_chain_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "inequality-chain", "--count", "2", "--seed", "3", "--starts", "8"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("cases.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
