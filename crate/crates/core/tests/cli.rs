//! End-to-end runs of the command-line driver: exit codes, error positions
//! and byte-stable outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

fn driver(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortex-patch")).args(args).output().expect("driver starts")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn passing_scenario_exits_zero_and_writes_its_outputs() {
    let out = tempfile::tempdir().unwrap();
    let s = scenario("rankine-stationarity");
    let o = driver(&["simulate2d", "--scenario", path_str(&s), "--out", path_str(out.path())]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("rankine-stationarity [contour2d] PASS"));
    let dir = out.path().join("rankine-stationarity");
    for f in ["report.json", "manifest.json", "artifacts/initial.contour", "artifacts/final.contour"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn failing_threshold_exits_one() {
    let out = tempfile::tempdir().unwrap();
    let s = scenario("rankine-stationarity");
    let o = driver(&[
        "simulate2d",
        "--scenario",
        path_str(&s),
        "--out",
        path_str(out.path()),
        "--resolution-override",
        "thresholds.area_drift.max=0.0",
    ]);
    assert_eq!(code(&o), 1, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&driver(&[])), 2);
    assert_eq!(code(&driver(&["simulate2d"])), 2);
    assert_eq!(code(&driver(&["frobnicate"])), 2);
    let s = scenario("rankine-stationarity");
    let o = driver(&["flatten", "--scenario", path_str(&s)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("module"), "{}", stderr(&o));
}

#[test]
fn unknown_key_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("typo.toml");
    std::fs::write(
        &file,
        "name = \"typo\"\nmodule = \"contour2d\"\n\n[contour]\nkind = \"circle\"\nmodes = 16\n\n[simulate2d]\nt_end = 0.1\n  tend = 0.2\n",
    )
    .unwrap();
    let o = driver(&["simulate2d", "--scenario", path_str(&file)]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line 10, column 3"), "{err}");
    assert!(err.contains("tend"), "{err}");
}

#[test]
fn negative_step_is_a_precondition_error() {
    let out = tempfile::tempdir().unwrap();
    let s = scenario("rankine-stationarity");
    let o = driver(&[
        "simulate2d",
        "--scenario",
        path_str(&s),
        "--out",
        path_str(out.path()),
        "--resolution-override",
        "simulate2d.dt=-0.01",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("precondition"), "{}", stderr(&o));
    assert!(!out.path().join("rankine-stationarity").exists());
}

#[test]
fn rerun_is_byte_identical_and_carries_the_monitor_series() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s = scenario("breakdown-monitor");
    for d in [&a, &b] {
        let o = driver(&["simulate2d", "--scenario", path_str(&s), "--out", path_str(d.path())]);
        assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    }
    let (da, db) = (a.path().join("breakdown-monitor"), b.path().join("breakdown-monitor"));
    let files = files_under(&da);
    assert_eq!(files, files_under(&db));
    for f in &files {
        assert_eq!(std::fs::read(da.join(f)).unwrap(), std::fs::read(db.join(f)).unwrap(), "{}", f.display());
    }
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(da.join("manifest.json")).unwrap()).unwrap();
    let names: Vec<&str> = manifest["series"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["1/chord_arc", "sobolev_norm", "grad_sup"] {
        assert!(names.contains(&n), "{names:?}");
    }
    let csv = std::fs::read_to_string(da.join("series/1_over_chord_arc.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("time,value"));

    // the first run serves as the golden copy of the second
    let o = driver(&[
        "report",
        "--scenario",
        path_str(&s),
        "--out",
        path_str(b.path()),
        "--golden",
        path_str(a.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("golden: identical"));
}

#[test]
fn report_runs_in_parallel_and_summarises_stored_runs() {
    let out = tempfile::tempdir().unwrap();
    let (x, y) = (scenario("boundary-jacobian-circle"), scenario("biot-savart-oracle"));
    let o = driver(&[
        "report",
        "--scenario",
        path_str(&x),
        "--scenario",
        path_str(&y),
        "--jobs",
        "2",
        "--out",
        path_str(out.path()),
    ]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(out.path().join("boundary-jacobian-circle/report.json").is_file());
    assert!(out.path().join("biot-savart-oracle/report.json").is_file());
    let o = driver(&["report", "--out", path_str(out.path())]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("biot-savart-oracle") && stdout(&o).contains("boundary-jacobian-circle"));
}

#[test]
fn solve_elliptic_takes_a_problem_file_and_mesh_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("kinked.toml");
    std::fs::write(&file, "case = \"kinked\"\ndegree = 1\n").unwrap();
    let out = dir.path().join("out");
    let o = driver(&["solve-elliptic", "--problem", path_str(&file), "--h", "0.2,0.1,0.05", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    let rates = std::fs::read_to_string(out.join("kinked/artifacts/rates.csv")).unwrap();
    let rows = rates.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count();
    assert_eq!(rows, 3, "{rates}");
    let o = driver(&["solve-elliptic", "--problem", path_str(&file), "--h", "0.2,0.1"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}
