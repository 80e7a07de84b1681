use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use cheeger_flow_cli::csv::TRACE_HEADER;

const BIN: &str = env!("CARGO_BIN_EXE_cheeger-flow");

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn last_row(csv: &str) -> Vec<String> {
    csv.lines()
        .last()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

#[test]
fn unit_sphere_area_law_and_monotonicity() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[scenario]\nname = \"round_sphere\"\nr = 1.0\ngrid_n = 64\n[verify]\nchecks = [\"area_law\", \"monotonicity\"]\n",
    );
    let out = tmp.path().join("out");
    let status = Command::new(BIN)
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), TRACE_HEADER);
    assert!(csv.ends_with('\n'));
    let row = last_row(&csv);
    assert_eq!(row.len(), 11);
    let t: f64 = row[0].parse().unwrap();
    let area: f64 = row[1].parse().unwrap();
    assert!((t - 0.25).abs() < 1e-12);
    assert!((area - 2.0 * PI).abs() <= 1e-6 * 4.0 * PI, "{area}");
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(
        text.contains("PASS area_law") && text.contains("PASS monotonicity"),
        "{text}"
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["artifact_version"], 1);
    assert_eq!(json["stop_reason"], "end_time");
    assert_eq!(json["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn stationarity_on_round_sphere_is_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = Command::new(BIN)
        .args([
            "--out",
            out.to_str().unwrap(),
            "--grid",
            "32",
            "--verify",
            "stationarity",
            "--quiet",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["stationarity_times"].as_array().unwrap().len(), 0);
    assert_eq!(json["checks"][0]["passed"], true);
}

#[test]
fn coarse_grid_is_rejected_before_the_flow() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let output = Command::new(BIN)
        .args(["--out", out.to_str().unwrap(), "--grid", "8"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("scenario.grid_n"), "{stderr}");
    assert!(!out.exists());
}

#[test]
fn failing_check_sets_status_and_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    // A tolerance no flow can meet.
    let cfg = write_config(
        tmp.path(),
        "[scenario]\nname = \"bump_sphere\"\ngrid_n = 32\n[flow]\nt_end = 0.01\n[verify]\nchecks = [\"papasoglu\", \"area_law\"]\narea_law_tol = 1e-30\n",
    );
    let out = tmp.path().join("out");
    let output = Command::new(BIN)
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("verification failed: area_law"), "{stderr}");
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(
        text.contains("FAIL area_law") && text.contains("PASS papasoglu"),
        "{text}"
    );
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("from-env");
    let status = Command::new(BIN)
        .env("CHEEGER_FLOW_OUT", &out)
        .args(["--grid", "16", "--verify", "papasoglu", "--quiet"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("trace.csv").exists());
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[scenario]\nname = \"dumbbell\"\ngrid_n = 96\n[flow]\nt_end = 0.02\n[verify]\nseed = 7\n",
    );
    let mut files = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let status = Command::new(BIN)
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--quiet",
            ])
            .status()
            .unwrap();
        assert!(status.success());
        files.push((
            fs::read(out.join("trace.csv")).unwrap(),
            fs::read(out.join("report.json")).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
}
