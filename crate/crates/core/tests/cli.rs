use std::path::Path;
use std::process::{Command, Output};

use pcd::harness::load_results;

fn pcd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const FAST: &[&str] = &[
    "--policy",
    "autoregressive",
    "--trials",
    "8",
    "--task",
    "reach",
];

#[test]
fn run_compares_against_baseline_and_logs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.jsonl");
    let mut args = vec![
        "run",
        "--compare",
        "--shift",
        "brightness",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(FAST);
    let o = pcd(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("pcd"));
    assert!(text.contains("baseline"));
    assert!(text.contains("one-sided p="));
    let lines = load_results(&out).unwrap();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].trials, 8);
}

#[test]
fn sweep_writes_one_csv_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let mut args = vec![
        "sweep",
        "--axis",
        "inpaint",
        "--values",
        "constant,mean,diffusion",
        "--csv",
        csv.to_str().unwrap(),
    ];
    args.extend_from_slice(FAST);
    let o = pcd(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("axis,value,"));
    assert!(rows[1].starts_with("inpaint,constant,"));
}

#[test]
fn mi_reports_both_factors() {
    let o = pcd(&[
        "mi",
        "--policy",
        "autoregressive",
        "--task",
        "reach",
        "--lambda",
        "0.6",
        "--rollouts",
        "100",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("light quadrant"));
    assert!(text.contains("target quadrant"));
}

#[test]
fn demo_writes_ppm_frames() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames");
    let o = pcd(&[
        "demo",
        "--policy",
        "autoregressive",
        "--task",
        "reach",
        "--frames-dir",
        frames.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(frames.join("step_0000.ppm")).unwrap();
    assert!(first.starts_with(b"P6\n"));
    assert!(frames.join("summary.txt").exists());
}

#[test]
fn calibrated_report_is_accepted_as_config() {
    let report = Path::new(env!("CARGO_MANIFEST_DIR")).join("benchmark/calibrated.json");
    let o = pcd(&["run", "--config", report.to_str().unwrap(), "--trials", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("shift=spatial"));
}

#[test]
fn bad_input_exits_nonzero() {
    assert!(!pcd(&["run", "--task", "juggle"]).status.success());
    assert!(!pcd(&["run", "--alpha", "-1", "--trials", "1"])
        .status
        .success());
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    let o = pcd(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(!o.stderr.is_empty());
}
