//! End-to-end checks of the `capgen` binary: formats, determinism, exit
//! codes.

use std::path::Path;
use std::process::{Command, Output};

fn capgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capgen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn count_prints_known_values() {
    assert_eq!(stdout(&capgen(&["count", "--n", "1"])).trim(), "1");
    assert_eq!(stdout(&capgen(&["count", "--n", "4"])).trim(), "1680384");
    assert_eq!(
        stdout(&capgen(&["count", "--n", "5"])).trim(),
        "14807804035657359360"
    );
}

#[test]
fn count_rejects_out_of_range() {
    let out = capgen(&["count", "--n", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_csv_shape_and_boundaries() {
    let out = stdout(&capgen(&[
        "generate", "--n", "3", "--method", "exact", "--count", "1", "--seed", "7",
    ]));
    let lines: Vec<&str> = out.trim().lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "0,1,2,3,4,5,6,7");
    let row: Vec<f64> = lines[1]
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert_eq!(row.len(), 8);
    assert_eq!(row[0], 0.0);
    assert_eq!(row[7], 1.0);
    for w in row[..7].windows(1) {
        assert!((0.0..=1.0).contains(&w[0]));
    }
}

#[test]
fn generate_is_byte_deterministic() {
    let args = [
        "generate", "--n", "4", "--method", "twolayer", "--count", "25", "--seed", "99",
    ];
    let a = capgen(&args);
    let b = capgen(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let args_jsonl = [
        "generate", "--n", "4", "--method", "markov", "--count", "5", "--seed", "3",
        "--markov-steps", "64", "--format", "jsonl",
    ];
    let a = capgen(&args_jsonl);
    let b = capgen(&args_jsonl);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("caps.csv");
    let out = capgen(&[
        "generate", "--n", "4", "--method", "randomnode", "--count", "50", "--seed", "11",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.trim().lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 16);
    // 17 significant digits reproduce each double exactly; writing the
    // parsed values back gives identical text.
    for line in lines {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.16e}"), field);
        }
    }
}

#[test]
fn jsonl_contains_seed_and_index() {
    let out = stdout(&capgen(&[
        "generate", "--n", "3", "--method", "twolayer", "--count", "3", "--seed", "21",
        "--format", "jsonl",
    ]));
    for (i, line) in out.trim().lines().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["seed"], 21);
        assert_eq!(v["index"], i);
        assert_eq!(v["values"].as_array().unwrap().len(), 8);
    }
}

#[test]
fn generate_usage_errors_exit_2() {
    assert_eq!(
        capgen(&["generate", "--n", "6", "--method", "exact"]).status.code(),
        Some(2)
    );
    assert_eq!(
        capgen(&["generate", "--n", "3", "--method", "banana"]).status.code(),
        Some(2)
    );
    assert_eq!(
        capgen(&["generate", "--n", "3", "--count", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        capgen(&["generate", "--n", "3", "--format", "json-report"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_reports_exact_sections_for_small_n(){
    let dir = tempfile::tempdir().unwrap();
    let caps = dir.path().join("caps.csv");
    let report_path = dir.path().join("report.json");
    assert!(capgen(&[
        "generate", "--n", "4", "--method", "twolayer", "--count", "2000", "--seed", "5",
        "--out", caps.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(capgen(&[
        "eval", caps.to_str().unwrap(), "--bins", "50",
        "--out", report_path.to_str().unwrap(),
    ])
    .status
    .success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["n"], 4);
    assert_eq!(report["sample_count"], 2000);
    assert_eq!(report["config"]["reference"], "exact");
    let metrics = report["metrics"].as_array().unwrap();
    let kl_rows: Vec<_> = metrics
        .iter()
        .filter(|m| m["metric"] == "kl_vs_exact")
        .collect();
    assert_eq!(kl_rows.len(), 14);
    for row in &kl_rows {
        assert!(row["value"].as_f64().unwrap() >= 0.0);
        assert!(row["subset"].as_u64().is_some());
    }
    assert!(metrics.iter().any(|m| m["metric"] == "centroid_squared_error"));
    assert!(metrics.iter().any(|m| m["metric"] == "ks_conjugate"));
    assert!(report["centroid"]["exact"].is_array());
    assert!(report["centroid"]["squared_error"].as_f64().unwrap() < 0.01);
}

#[test]
fn eval_is_symmetry_only_for_large_n() {
    let dir = tempfile::tempdir().unwrap();
    let caps = dir.path().join("caps.jsonl");
    assert!(capgen(&[
        "generate", "--n", "6", "--method", "twolayer", "--count", "1200", "--seed", "5",
        "--format", "jsonl", "--out", caps.to_str().unwrap(),
    ])
    .status
    .success());
    let out = stdout(&capgen(&["eval", caps.to_str().unwrap()]));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["config"]["reference"], "symmetry");
    let metrics = report["metrics"].as_array().unwrap();
    assert!(!metrics.iter().any(|m| m["metric"] == "kl_vs_exact"));
    assert!(metrics.iter().any(|m| m["metric"] == "ks_same_cardinality_max"));
    assert!(report["centroid"]["exact"].is_null());
    // Forcing the exact reference out of range is a usage error.
    assert_eq!(
        capgen(&["eval", caps.to_str().unwrap(), "--reference", "exact"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eval_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        capgen(&["eval", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "0,1,2,3\n").unwrap();
    assert_eq!(capgen(&["eval", empty.to_str().unwrap()]).status.code(), Some(1));
    let malformed = dir.path().join("bad.csv");
    std::fs::write(&malformed, "0,1,2\n0.0,0.5,1.0\n").unwrap();
    assert_eq!(
        capgen(&["eval", malformed.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn bench_emits_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("bench.json");
    let out = stdout(&capgen(&[
        "bench", "--n", "3", "--method", "twolayer,randomnode", "--count", "200",
        "--seed", "2", "--out", json_path.to_str().unwrap(),
    ]));
    assert!(out.contains("machine:"));
    assert!(out.contains("twolayer"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 2);
    assert!(report["machine"]["cpus"].as_u64().unwrap() >= 1);

    assert_eq!(
        capgen(&["bench", "--n", "3", "--count", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        capgen(&["bench", "--n", "3", "--method", "warp"]).status.code(),
        Some(2)
    );
}

#[test]
fn analyze_structure_reports_the_counterexample() {
    let out = stdout(&capgen(&[
        "analyze-structure", "--n", "4", "--upper", "123,124", "--lower", "23,24",
    ]));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["regular"], true);
    assert_eq!(report["balanced"], true);
    assert_eq!(report["closed_under_intersection"], false);
    assert_eq!(report["class"]["kind"], "not_closed");
    assert_eq!(report["h"], 2);
    assert_eq!(report["k"], 2);
}

#[test]
fn analyze_structure_selection_matches_worked_example() {
    // Single upper node over five 2-sets, two of them isolated: the upper
    // node is picked with probability 2/3, each isolated node with 1/6.
    let out = stdout(&capgen(&[
        "analyze-structure", "--n", "4", "--upper", "123",
        "--lower", "12,13,23,24,34",
    ]));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    let selection = report["selection"].as_array().unwrap();
    assert_eq!(selection.len(), 3);
    let by_node = |name: &str| {
        selection
            .iter()
            .find(|s| s["node"] == name)
            .unwrap_or_else(|| panic!("{name} missing from {selection:?}"))
            .clone()
    };
    assert_eq!(by_node("123")["exact"], "2/3");
    assert_eq!(by_node("24")["exact"], "1/6");
    assert_eq!(by_node("34")["exact"], "1/6");

    assert_eq!(
        capgen(&["analyze-structure", "--n", "4", "--upper", "12x"]).status.code(),
        Some(2)
    );
}

#[test]
fn dot_notation_parses_for_wide_ground_sets() {
    let out = stdout(&capgen(&[
        "analyze-structure", "--n", "12", "--upper", "1.2.11,1.2.12", "--lower", "1.2",
    ]));
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["class"]["kind"], "coatom_family");
}

#[test]
fn exact_and_twolayer_generate_under_load() {
    // method=twolayer at n=5 with a few thousand rows: all rows validate on
    // re-read (eval validates every row).
    let dir = tempfile::tempdir().unwrap();
    let caps = dir.path().join("caps.csv");
    assert!(capgen(&[
        "generate", "--n", "5", "--method", "twolayer", "--count", "3000", "--seed", "1",
        "--out", caps.to_str().unwrap(),
    ])
    .status
    .success());
    assert!(Path::new(&caps).exists());
    assert!(capgen(&["eval", caps.to_str().unwrap()]).status.success());
}
