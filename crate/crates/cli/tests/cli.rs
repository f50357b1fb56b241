use std::path::Path;
use std::process::{Command, Output};

fn kdvgas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdvgas")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"grid": {"x_min": -3, "x_max": 2, "nx": 9, "t": [0, 0.5]}, "n_nodes": 40, "ensemble_n": 30}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        let o = kdvgas(&["eval", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("x,t,u_exact,u_gas,u_asym,region,flags\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 18);
    // t-major order.
    assert!(rows[..9].iter().all(|r| r[1] == "0.0000000000000000e0"));
    assert!(dir.path().join("a.summary.json").exists());
}

#[test]
fn summary_reports_cross_route_difference() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = kdvgas(&[
        "eval", "--routes", "exact,gas", "--ensemble-n", "100", "--n-nodes", "60", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.summary.json")).unwrap()).unwrap();
    let d = summary["max_abs_diff"]["exact_gas"].as_f64().unwrap();
    assert!(d > 0.0 && d < 0.05, "{d}");
    assert_eq!(summary["config"]["ensemble_n"], 100);
}

#[test]
fn zero_reflection_gives_zero_gas_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.json", r#"{"reflection": {"kind": "zero"}, "routes": ["gas"]}"#);
    let o = kdvgas(&["eval", "--config", &cfg]);
    assert!(o.status.success());
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0 && r[2].is_empty() && r[4].is_empty()));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let inverted = write(dir.path(), "bad.json", r#"{"spectrum": {"eta1": 1.5, "eta2": 0.5}}"#);
    let unknown = write(dir.path(), "typo.json", r#"{"grids": {}}"#);
    let narrow = write(dir.path(), "nx.json", r#"{"grid": {"x_min": 0, "x_max": 1, "nx": 1, "t": [0]}}"#);
    for args in [
        vec!["eval", "--config", inverted.as_str()],
        vec!["validate", "--config", inverted.as_str()],
        vec!["eval", "--config", unknown.as_str()],
        vec!["eval", "--config", narrow.as_str()],
        vec!["eval", "--routes", "fast"],
        vec!["eval", "--routes", ""],
        vec!["eval", "--config", "/nonexistent/run.json"],
        vec!["validate", "--criteria", "12"],
    ] {
        assert_eq!(kdvgas(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn overflow_rows_are_flagged_and_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t50.json",
        r#"{"grid": {"x_min": -1, "x_max": 1, "nx": 3, "t": [0.5, 50]}, "routes": ["gas"], "n_nodes": 32}"#,
    );
    let o = kdvgas(&["eval", "--config", &cfg]);
    assert!(o.status.success());
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows[..3].iter().all(|r| !r[3].is_empty()));
    assert!(rows[3..].iter().all(|r| r[3].is_empty() && r[6] == "gas_overflow"));

    let o = kdvgas(&["validate", "--config", &cfg, "--criteria", "1,7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.iter().all(|r| r["pass"] == true));
    assert!(report.iter().any(|r| r["check"] == "flagged rows" && r["value"] == 3.0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS criterion 7"));
}

#[test]
fn whitham_table_spans_the_fan() {
    let o = kdvgas(&["whitham", "--samples", "30", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 30);
    assert_eq!(rows[0]["alpha"], 0.5);
    assert_eq!(rows[0]["xi"], doc["markers"]["xi_crit"]);
    let last = &rows[29];
    assert!((last["xi"].as_f64().unwrap() - 2.25).abs() < 1e-6);
    assert!((last["alpha"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn fig1_has_three_regions_at_the_predicted_places() {
    let o = kdvgas(&["fig1"]);
    assert!(o.status.success());
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    let first = |tag: &str| rows.iter().position(|r| r[5] == tag).unwrap();
    let x = |i: usize| rows[i][0].parse::<f64>().unwrap();
    // Boundaries at 4t·ξ_crit ≈ −112.39 and 4t·η₂² = 90.
    let m = first("modulated");
    assert!(x(m - 1) <= -112.39 && x(m) >= -112.39);
    let d = first("decay");
    assert!(x(d - 1) < 90.0 && x(d) >= 90.0);
    assert_eq!(rows[0][5], "unmodulated");
    assert!(rows.iter().all(|r| !r[4].is_empty() && r[2].is_empty() && r[3].is_empty()));
}

#[test]
fn phases_report() {
    let o = kdvgas(&["phases", "--xi", "-1.0"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((doc["phi"].as_f64().unwrap() + 0.3719).abs() < 1e-3);
    assert_eq!(doc["g_static"]["pass"], true);
    assert_eq!(doc["at_xi"]["region"], "modulated");
    assert_eq!(doc["at_xi"]["g_report"]["pass"], true);
}
