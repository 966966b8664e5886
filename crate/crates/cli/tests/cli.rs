use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn caliber(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caliber")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

#[test]
fn tables_pass() {
    let out = caliber(&["tables"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Spin(7)"));
    assert!(text.contains("all rows match"));
}

#[test]
fn tables_json_schema() {
    let out = caliber(&["tables", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    for row in rows {
        for key in ["package", "n", "k", "calibration", "group_label", "subgroup_label", "dims", "compliant", "pass"] {
            assert!(row.get(key).is_some(), "{key}");
        }
    }
    let cayley = rows.iter().find(|r| r["package"] == "cayley").unwrap();
    assert_eq!(cayley["dims"]["g"], 21);
    assert_eq!(cayley["dims"]["h"], 9);
}

#[test]
fn corrupted_phi_fails_tables() {
    let path = fixture("corrupted_phi.json");
    let out = caliber(&["tables", "--json", "--assoc-form", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let assoc = v["rows"].as_array().unwrap().iter().find(|r| r["package"] == "assoc").unwrap().clone();
    assert_eq!(assoc["pass"], false);
    assert_ne!(assoc["dims"]["g"], 14);
}

#[test]
fn malformed_form_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 7, \"k\": 3, \"terms\": [{\"idx\": [3, 1, 2], \"coef\": \"1\"}]}").unwrap();
    let out = caliber(&["tables", "--assoc-form", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&caliber(&["comass", "--form", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&caliber(&["comass", "--form", "/nonexistent/form.json"])), 2);
}

#[test]
fn compliancy_slag() {
    let out = caliber(&["compliancy", "--package", "slag", "--m", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["compliant"], true);
    assert_eq!(v["parity"]["Re Upsilon"], "even");
    assert_eq!(v["parity"]["Im Upsilon"], "odd");
    assert_eq!(v["parity"]["omega"], "odd");
    assert_eq!(v["involution_in_hatG"], true);
}

#[test]
fn compliancy_double_point() {
    let out = caliber(&["compliancy", "--package", "double-point", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["compliant"], true);
    assert_eq!(v["involution_in_hatG"], false);
    assert_eq!(v["dims"]["g_cap_offdiag"], 0);
}

#[test]
fn compliancy_assoc_dims() {
    let out = caliber(&["compliancy", "--package", "assoc", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let dims: Vec<i64> =
        ["g", "h", "h_perp_g", "g_cap_offdiag"].iter().map(|k| v["dims"][k].as_i64().unwrap()).collect();
    assert_eq!(dims, [14, 6, 8, 8]);
    for key in ["package", "parity", "signs", "ad_phi_preserves_g", "symmetric_pair"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn compliancy_on_a_rotated_plane() {
    // The standard Kähler plane rotated within itself by a 3-4-5 rotation.
    let dir = tempfile::tempdir().unwrap();
    let plane = dir.path().join("plane.json");
    std::fs::write(&plane, "[[0.6, 0.8, 0.0, 0.0], [-0.8, 0.6, 0.0, 0.0]]").unwrap();
    let out = caliber(&["compliancy", "--package", "kahler-2-1", "--plane", plane.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["dims"]["g"], 4);
    assert_eq!(v["dims"]["h"], 2);
    assert_eq!(v["compliant"], true);
    // An uncalibrated plane is rejected as input.
    std::fs::write(&plane, "[[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]").unwrap();
    let out = caliber(&["compliancy", "--package", "kahler-2-1", "--plane", plane.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn immersion_complex_graph_passes() {
    let out = caliber(&["immersion", "--example", "complex-graph", "--package", "kahler-2-1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn immersion_json_schema() {
    let out = caliber(&["immersion", "--example", "plane", "--package", "cayley", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    for key in ["example", "package", "grid", "step", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["package"], "cayley");
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], c["max_residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn noncalibrated_control_fails_the_gate() {
    let out = caliber(&["immersion", "--example", "noncalibrated-control", "--json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["calibrated"], false);
    let checks = v["checks"].as_array().unwrap();
    let gate = checks.iter().find(|c| c["name"] == "calibrated").unwrap();
    assert_eq!(gate["pass"], false);
    let diamond = checks.iter().find(|c| c["name"] == "diamond:omega").unwrap();
    assert_eq!(diamond["applicable"], false);
    assert!(diamond["max_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn halving_the_step_shrinks_residuals_fourfold() {
    let residual = |step: &str| {
        let out = caliber(&["immersion", "--example", "complex-graph", "--step", step, "--json"]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "gcr_closure").unwrap().clone();
        c["max_residual"].as_f64().unwrap()
    };
    let ratio = residual("1e-3") / residual("5e-4");
    assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn immersion_convergence_flag() {
    let out = caliber(&["immersion", "--example", "assoc-product", "--grid", "3", "--convergence", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["report"]["checks"].is_array());
    let entries = v["convergence"].as_array().unwrap();
    assert!(entries.iter().any(|e| e["applicable"] == true));
}

#[test]
fn comass_cayley() {
    let out = caliber(&["comass", "--package", "cayley", "--samples", "2000", "--seed", "7", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["max_found"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
    assert_eq!(v["certificate"], true);
}

#[test]
fn comass_double_point_lands_on_an_axis_plane() {
    let out = caliber(&["comass", "--package", "double-point", "--samples", "200"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("principal angle")).unwrap();
    let angle: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(angle < 1e-4);
}

#[test]
fn comass_form_file_matches_package() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.json");
    std::fs::write(&path, caliber::calibrations::phi().to_json()).unwrap();
    let args = ["--samples", "50", "--iters", "100", "--seed", "3", "--json"];
    let a = caliber(&[&["comass", "--package", "assoc"][..], &args].concat());
    let b = caliber(&[&["comass", "--form", path.to_str().unwrap()][..], &args].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |file: &str, threads: &str| {
        let path = dir.path().join(file);
        let status = Command::new(env!("CARGO_BIN_EXE_caliber"))
            .args(["comass", "--package", "coassoc", "--samples", "64", "--seed", "11", "--json", "--out"])
            .arg(&path)
            .env("CALIBER_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(path).unwrap()
    };
    let first = run("a.json", "1");
    assert_eq!(first, run("b.json", "4"));
    assert_eq!(first, run("c.json", "1"));

    let report = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_caliber"))
            .args(["immersion", "--example", "slag-graph", "--json"])
            .env("CALIBER_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(report("1"), report("3"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["immersion", "--example", "torus"],
        &["immersion", "--example", "complex-graph", "--grid", "2"],
        &["immersion", "--example", "complex-graph", "--step", "-1"],
        &["immersion", "--example", "slag-graph", "--package", "assoc"],
        &["compliancy", "--package", "kahler", "--m", "2", "--p", "3"],
        &["compliancy", "--package", "octonion"],
        &["compliancy", "--package", "assoc", "--m", "2"],
        &["comass"],
    ] {
        let out = caliber(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_caliber"))
        .args(["tables"])
        .env("CALIBER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&caliber(&["--help"])), 0);
    assert_eq!(code(&caliber(&["immersion", "--help"])), 0);
}
