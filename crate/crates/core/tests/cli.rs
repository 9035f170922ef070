//! End-to-end tests of the `homoconn` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn homoconn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homoconn")).args(args).env_remove("HOMOCONN_SEED").output().expect("spawn homoconn")
}

fn json_of(args: &[&str]) -> Value {
    let out = homoconn(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array().unwrap().iter().map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()).collect()
}

#[test]
fn dims_rows_come_from_the_solver() {
    let report = json_of(&["dims", "--n", "1,3,4"]);
    assert_eq!(report["command"], "dims");
    for key in ["config", "results", "residuals", "verdicts"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let rows: Vec<(u64, u64, u64, u64)> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["n"].as_u64().unwrap(), r["invariant"].as_u64().unwrap(), r["metric"].as_u64().unwrap(), r["skew"].as_u64().unwrap()))
        .collect();
    assert_eq!(rows, vec![(1, 27, 9, 1), (3, 9, 5, 3), (4, 7, 3, 1)]);
}

#[test]
fn dims_markdown_table() {
    let out = homoconn(&["dims", "--n", "2,4", "--format", "markdown"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("| S^5 | 2 | 13 | 7 | 3 |"), "{text}");
    assert!(text.contains("| S^9 | 4 | 7 | 3 | 1 |"), "{text}");
}

#[test]
fn s7_flat_point() {
    let report = json_of(&["connection", "--sphere", "s7", "--r", "1", "--q", "1+0i", "--format", "json"]);
    assert_eq!(report["verdicts"]["is_einstein"], true);
    assert!(report["results"]["report"]["curvature_max"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["verdicts"]["s7_flatness"]["curvature_class"], "flat");
    assert_eq!(report["results"]["connection"]["q"], serde_json::json!({"re": 1.0, "im": 0.0}));
}

#[test]
fn s7_totally_skew_point() {
    let report = json_of(&["connection", "--sphere", "s7", "--r", "-1", "--q", "i"]);
    assert_eq!(report["verdicts"]["is_einstein"], true);
    let flat = &report["verdicts"]["s7_flatness"];
    assert_eq!(flat["curvature_class"], "totally_skew");
    assert!(flat["cyclic_defect"].as_f64().unwrap() < 1e-9);
    assert!(report["results"]["report"]["curvature_max"].as_f64().unwrap() > 0.1);
    for row in matrix(&report["results"]["report"]["sym_ricci"]) {
        assert!(row.iter().all(|x| x.abs() < 1e-9));
    }
}

#[test]
fn s5_ricci_point() {
    let report = json_of(&["connection", "--sphere", "s5", "--r", "0.3", "--q", "0.4"]);
    assert_eq!(report["verdicts"]["is_einstein"], false);
    let sym = matrix(&report["results"]["report"]["sym_ricci"]);
    for (i, row) in sym.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let want = match (i == j, i) {
                (true, 4) => 3.0,
                (true, _) => 3.5,
                _ => 0.0,
            };
            assert!((x - want).abs() < 1e-9, "({i},{j}) = {x}");
        }
    }
    // The route through the torsion agrees with the direct trace.
    let via = matrix(&report["results"]["report"]["sym_ricci_via_torsion"]);
    assert!(sym.iter().flatten().zip(via.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-8));
}

#[test]
fn named_and_params_connections() {
    let lc = json_of(&["connection", "--sphere", "general", "--n", "4", "--named", "levi_civita"]);
    assert!(lc["results"]["report"]["torsion_max"].as_f64().unwrap() < 1e-10);
    let params = r#"{"family": "general_metric", "q": {"re": 1, "im": 0}, "t": -0.25}"#;
    let fam = json_of(&["connection", "--sphere", "general", "--n", "4", "--params", params]);
    assert!(fam["results"]["report"]["torsion_max"].as_f64().unwrap() < 1e-10);
}

#[test]
fn s7_scan_example() {
    let report = json_of(&["scan", "--sphere", "s7", "--r-grid", "-1,0,1", "--q-grid", "0,1,i"]);
    let mut locus: Vec<(f64, f64, f64)> = report["results"]["locus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["r"].as_f64().unwrap(), p["q"]["re"].as_f64().unwrap(), p["q"]["im"].as_f64().unwrap()))
        .collect();
    locus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(locus, vec![(-1.0, 0.0, 1.0), (-1.0, 1.0, 0.0), (0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (1.0, 1.0, 0.0)]);
    assert_eq!(report["verdicts"]["locus_matches_prediction"], true);
    let idx: Vec<u64> = report["results"]["points"].as_array().unwrap().iter().map(|p| p["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, (0..9).collect::<Vec<u64>>());
}

#[test]
fn s3_and_general_scans() {
    let s3 = json_of(&["scan", "--sphere", "s3", "--r-grid", "-2:2:1"]);
    assert_eq!(s3["verdicts"]["einstein_points"], 5);
    assert_eq!(s3["verdicts"]["total_points"], 5);
    let g = json_of(&["scan", "--sphere", "general", "--n", "5", "--r-grid", "0,0.5,1"]);
    let locus = g["results"]["locus"].as_array().unwrap();
    assert_eq!(locus.len(), 1);
    assert_eq!(locus[0]["r"], 0.0);
}

#[test]
fn scan_is_independent_of_worker_count() {
    let args = |w: &'static str| ["scan", "--sphere", "s7", "--r-grid", "-1:1:0.5", "--q-grid", "-1,0,1", "--q-im-grid", "0,1", "--workers", w];
    let one = json_of(&args("1"));
    let many = json_of(&args("6"));
    assert_eq!(one["results"], many["results"]);
}

#[test]
fn verify_defaults_and_seed_env() {
    let report = json_of(&["verify", "--trials", "10"]);
    assert_eq!(report["config"]["seed"], 2024);
    assert_eq!(report["verdicts"]["all_passed"], true);

    let out = Command::new(env!("CARGO_BIN_EXE_homoconn")).args(["verify", "--trials", "10"]).env("HOMOCONN_SEED", "7").output().unwrap();
    assert!(out.status.success());
    let seeded: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(seeded["config"]["seed"], 7);
    assert_eq!(seeded["verdicts"]["all_passed"], true);
}

#[test]
fn verify_seed_seven_many_trials() {
    let report = json_of(&["verify", "--seed", "7", "--trials", "500"]);
    assert_eq!(report["verdicts"]["all_passed"], true);
}

#[test]
fn verify_failure_exit_code() {
    let out = homoconn(&["verify", "--trials", "2", "--perturb-structure-constants"]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdicts"]["jacobi"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["connection", "--sphere", "s8"],
        vec!["connection", "--sphere", "s7", "--params", "{\"bad\": 1}"],
        vec!["connection", "--sphere", "s3", "--q", "1"],
        vec!["scan", "--sphere", "s7", "--r-grid", "1:0"],
        vec!["dims", "--n", "0"],
        vec!["no-such-command"],
    ] {
        let out = homoconn(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = homoconn(&["connection", "--sphere", "s7", "--params", "[]"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("family"));
}

#[test]
fn out_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join(format!("homoconn-cli-{}.json", std::process::id()));
    let out = homoconn(&["dims", "--n", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(report["results"][0]["invariant"], 13);
}
