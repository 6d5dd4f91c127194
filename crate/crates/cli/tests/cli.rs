//! End-to-end tests of the `fairdiv` binary and the ingest round-trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fairdiv::MetricKind;
use fairdiv_cli::io::{read_matrix, read_points, write_matrix_csv, write_points_csv};

const LINE_POINTS: &str = "id,groups,f1\n\
    p0,black,0.0\n\
    p1,black,4.0\n\
    p2,black,10.0\n\
    p3,white,4.5\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairdiv"))
}

fn write(dir: &Path, name: &str, content: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a json record")
}

#[test]
fn select_fair_swap_on_line_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args(["--algorithm", "fair-swap", "--constraints", "black=2,white=1"])
        .output()
        .unwrap();
    let record = json(&out);
    assert_eq!(record["algorithm"], "fair-swap");
    assert_eq!(record["diversity"], 4.5);
    assert_eq!(record["per_group_counts"]["black"], 2);
    assert_eq!(record["per_group_counts"]["white"], 1);
    assert_eq!(record["aborted"], false);
    let ids: Vec<&str> = record["selected"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids.len(), 3);
    assert!(ids.contains(&"p3"));
}

#[test]
fn oracle_matches_on_line_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["oracle", "--input"])
        .arg(&input)
        .args(["--constraints", "black=2,white=1"])
        .output()
        .unwrap();
    let record = json(&out);
    assert_eq!(record["algorithm"], "oracle-maxmin");
    assert_eq!(record["diversity"], 4.5);
}

#[test]
fn fair_flow_accepts_two_groups() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args(["--algorithm", "fair-flow", "--constraints", "black=2,white=1"])
        .output()
        .unwrap();
    let record = json(&out);
    assert_eq!(record["aborted"], false);
    assert_eq!(record["per_group_counts"]["black"], 2);
}

#[test]
fn parse_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "id,groups,f1\nx,a,not-a-number\n");
    let out = bin()
        .args(["select", "--input"])
        .arg(&bad)
        .args(["--algorithm", "fair-swap", "--constraints", "a=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains(":2:"), "missing line number: {msg}");

    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args(["--algorithm", "fair-swap", "--constraints", "green=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_constraints_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args(["--algorithm", "fair-swap", "--constraints", "black=2,white=2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budget_refusal_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args([
            "--algorithm",
            "fair-gmm",
            "--constraints",
            "black=2,white=1",
            "--budget",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn check_metric_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let clean = write(dir.path(), "m.csv", "0,1,2\n1,0,1.5\n2,1.5,0\n");
    let labels = write(dir.path(), "l.csv", "id,groups\na,g\nb,g\nc,h\n");
    let out = bin()
        .args(["check-metric", "--input"])
        .arg(&clean)
        .arg("--labels")
        .arg(&labels)
        .args(["--metric", "precomputed"])
        .output()
        .unwrap();
    let report = json(&out);
    assert_eq!(report["total_violations"], 0);

    let broken = write(dir.path(), "mb.csv", "0,1,10\n1,0,1\n10,1,0\n");
    let out = bin()
        .args(["check-metric", "--input"])
        .arg(&broken)
        .arg("--labels")
        .arg(&labels)
        .args(["--metric", "precomputed"])
        .output()
        .unwrap();
    let report = json(&out);
    assert!(report["total_violations"].as_u64().unwrap() > 0);
}

#[test]
fn kcenter_record_uses_radius() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args([
            "--algorithm",
            "fair-kcenter",
            "--constraints",
            "black=1,white=1",
        ])
        .output()
        .unwrap();
    let record = json(&out);
    assert!(record.get("radius").is_some());
    assert!(record.get("diversity").is_none());
}

#[test]
fn records_are_deterministic_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let run = || {
        let out = bin()
            .args(["select", "--input"])
            .arg(&input)
            .args([
                "--algorithm",
                "fair-flow",
                "--constraints",
                "black=2,white=1",
                "--seed",
                "7",
            ])
            .output()
            .unwrap();
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("wall_ms");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn bench_smoke_run_stays_within_bounds() {
    let out = bin()
        .args([
            "bench",
            "--n-min",
            "6",
            "--n-max",
            "9",
            "--k",
            "1,1",
            "--instances",
            "5",
            "--algorithms",
            "fair-swap,fair-gmm,fair-kcenter",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    let report = json(&out);
    for (_, agg) in report["aggregates"].as_object().unwrap() {
        assert_eq!(agg["all_within_bound"], true, "{agg}");
        assert_eq!(agg["errors"], 0);
    }
    assert_eq!(report["records"].as_array().unwrap().len(), 15);
}

#[test]
fn bench_timing_mode_reports_ratio() {
    let out = bin()
        .args([
            "bench",
            "--n-min",
            "200",
            "--n-max",
            "2000",
            "--k",
            "2,2",
            "--instances",
            "3",
            "--algorithms",
            "fair-swap",
            "--timing-only",
        ])
        .output()
        .unwrap();
    let report = json(&out);
    let rec = &report["records"][0];
    assert_eq!(rec["algorithm"], "fair-swap");
    assert!(rec["ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn multi_label_rows_infer_overlapping_mode() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "ov.csv",
        "id,groups,f1\na,w,0.0\nb,w|b,3.0\nc,b,7.0\nd,w|b,20.0\n",
    );
    let out = bin()
        .args(["select", "--input"])
        .arg(&input)
        .args([
            "--algorithm",
            "fair-swap-overlap",
            "--constraints",
            "w=2,b=1",
        ])
        .output()
        .unwrap();
    let record = json(&out);
    assert_eq!(record["aborted"], false);
    assert!(record["per_group_counts"]["w"].as_u64().unwrap() >= 2);
    assert!(record["per_group_counts"]["b"].as_u64().unwrap() >= 1);
}

#[test]
fn env_budget_applies_and_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let mut args = vec!["select", "--input"];
    let path = input.to_str().unwrap();
    args.extend(["--algorithm", "fair-gmm", "--constraints", "black=2,white=1"]);
    args.insert(2, path);

    let out = bin().args(&args).env("FAIRDIV_BUDGET", "1").output().unwrap();
    assert_eq!(out.status.code(), Some(4), "env budget should apply");

    let out = bin()
        .args(&args)
        .args(["--budget", "1000000"])
        .env("FAIRDIV_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "flag should win over env");
}

/// A matrix that breaks the triangle inequality can defeat the structural
/// component guarantees; that surfaces as the internal-assertion exit code
/// rather than a silent wrong answer.
#[test]
fn broken_metric_can_trip_the_internal_assertion() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.csv", "0,1,100\n1,0,1\n100,1,0\n");
    let labels = write(dir.path(), "l.csv", "id,groups\na,g1\nb,g2\nc,g3\n");
    let out = bin()
        .args(["select", "--input"])
        .arg(&matrix)
        .arg("--labels")
        .arg(&labels)
        .args([
            "--metric",
            "precomputed",
            "--algorithm",
            "fair-flow",
            "--constraints",
            "g1=1,g2=1,g3=1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn points_round_trip_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pts.csv", LINE_POINTS);
    let ds = read_points(&input, MetricKind::Euclidean).unwrap();
    let serialized = write_points_csv(&ds);
    let back = write(dir.path(), "again.csv", &serialized);
    let ds2 = read_points(&back, MetricKind::Euclidean).unwrap();
    assert_eq!(ds.len(), ds2.len());
    assert_eq!(ds.mode(), ds2.mode());
    for (u, v) in ds.element_ids().zip(ds2.element_ids()) {
        assert_eq!(ds.external_id(u), ds2.external_id(v));
        assert_eq!(ds.point(u), ds2.point(v));
        let la: Vec<&str> = ds.memberships(u).iter().map(|&g| ds.group_label(g)).collect();
        let lb: Vec<&str> = ds2.memberships(v).iter().map(|&g| ds2.group_label(g)).collect();
        assert_eq!(la, lb);
    }
}

#[test]
fn matrix_round_trip_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(dir.path(), "m.csv", "0,1,2.25\n1,0,1.5\n2.25,1.5,0\n");
    let labels = write(dir.path(), "l.csv", "id,groups\na,g\nb,g|h\nc,h\n");
    let ds = read_matrix(&matrix, &labels).unwrap();
    let (m2, l2) = write_matrix_csv(&ds);
    let matrix2 = write(dir.path(), "m2.csv", &m2);
    let labels2 = write(dir.path(), "l2.csv", &l2);
    let ds2 = read_matrix(&matrix2, &labels2).unwrap();
    assert_eq!(ds.len(), ds2.len());
    assert_eq!(ds.mode(), ds2.mode());
    for (u, v) in ds.element_ids().zip(ds2.element_ids()) {
        assert_eq!(ds.external_id(u), ds2.external_id(v));
        for (w, x) in ds.element_ids().zip(ds2.element_ids()) {
            assert_eq!(ds.distance(u, w), ds2.distance(v, x));
        }
    }
}
