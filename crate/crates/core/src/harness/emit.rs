//! Plot-ready output: one `time,value` CSV per series and a JSON manifest.
//!
//! Layout of a scenario output directory:
//!
//! ```text
//! report.json
//! manifest.json
//! series/<name>.csv
//! artifacts/<file>
//! ```

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::run::RunOutput;
use crate::contour2d::DiagnosticSeries;
use crate::error::Result;
use crate::textio::fmt17;

/// File stem of a series: `/` reads as `_over_`, other characters outside
/// `[A-Za-z0-9_-]` become `_`.
pub fn series_file_stem(name: &str) -> String {
    let mut s = String::new();
    for ch in name.chars() {
        match ch {
            '/' => s += "_over_",
            c if c.is_ascii_alphanumeric() || c == '_' || c == '-' => s.push(c),
            _ => s.push('_'),
        }
    }
    s
}

pub fn series_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("time,value\n");
    for (t, v) in points {
        s += &format!("{},{}\n", fmt17(*t), fmt17(*v));
    }
    s
}

#[derive(Debug, Serialize)]
struct ManifestEntry<'a> {
    name: &'a str,
    file: String,
    points: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    config_hash: &'a str,
    series: Vec<ManifestEntry<'a>>,
}

/// Writes `series/*.csv` and `manifest.json` under `dir`, series sorted by name.
pub fn emit_series(dir: &Path, scenario: &str, config_hash: &str, series: &DiagnosticSeries) -> Result<Vec<PathBuf>> {
    let by_name = series.by_name();
    let mut written = Vec::new();
    let mut entries = Vec::new();
    let mut used: Vec<String> = Vec::new();
    if !by_name.is_empty() {
        std::fs::create_dir_all(dir.join("series"))?;
    }
    for (name, points) in &by_name {
        let mut stem = series_file_stem(name);
        while used.contains(&stem) {
            stem.push('_');
        }
        used.push(stem.clone());
        let file = format!("series/{stem}.csv");
        let path = dir.join(&file);
        std::fs::write(&path, series_csv(points))?;
        written.push(path);
        entries.push(ManifestEntry {
            name,
            file,
            points: points.len(),
        });
    }
    let manifest = Manifest {
        scenario,
        config_hash,
        series: entries,
    };
    std::fs::create_dir_all(dir)?;
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)? + "\n")?;
    written.push(path);
    Ok(written)
}

/// Writes series, manifest, artifacts and `report.json` into `dir`.
pub fn write_run(dir: &Path, output: &RunOutput) -> Result<Vec<PathBuf>> {
    let r = &output.report;
    let mut written = emit_series(dir, &r.scenario.name, &r.config_hash, &output.series)?;
    for a in &output.artifacts {
        let path = dir.join(&a.name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &a.bytes)?;
        written.push(path);
    }
    let path = dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(r).map_err(std::io::Error::other)? + "\n")?;
    written.push(path);
    Ok(written)
}

fn files_under(root: &Path, rel: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = std::fs::read_dir(root.join(rel))?.collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let r = rel.join(e.file_name());
        if e.file_type()?.is_dir() {
            files_under(root, &r, out)?;
        } else {
            out.push(r);
        }
    }
    Ok(())
}

/// Golden-file regression: relative paths of files under `golden` that are
/// missing from `dir` or differ byte for byte.
pub fn compare_with_golden(dir: &Path, golden: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    files_under(golden, Path::new(""), &mut files)?;
    let mut differing = Vec::new();
    for rel in files {
        let expected = std::fs::read(golden.join(&rel))?;
        match std::fs::read(dir.join(&rel)) {
            Ok(actual) if actual == expected => {}
            _ => differing.push(rel),
        }
    }
    Ok(differing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_are_file_safe() {
        assert_eq!(series_file_stem("1/chord_arc"), "1_over_chord_arc");
        assert_eq!(series_file_stem("grad sup"), "grad_sup");
    }

    #[test]
    fn empty_series_give_an_empty_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_series(dir.path(), "empty", "0", &DiagnosticSeries::default()).unwrap();
        assert_eq!(files.len(), 1);
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert_eq!(m["series"].as_array().unwrap().len(), 0);
        assert!(!dir.path().join("series").exists());
    }

    #[test]
    fn output_is_byte_stable() {
        let mut s = DiagnosticSeries::default();
        for i in 0..5 {
            s.push(i as f64 * 0.1, "b", (i as f64).sin());
            s.push(i as f64 * 0.1, "1/a", 1.0 / (i as f64 + 1.0));
        }
        let read = |d: &Path| {
            let mut out = Vec::new();
            for f in ["manifest.json", "series/b.csv", "series/1_over_a.csv"] {
                out.push(std::fs::read(d.join(f)).unwrap());
            }
            out
        };
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        emit_series(d1.path(), "x", "h", &s).unwrap();
        emit_series(d2.path(), "x", "h", &s).unwrap();
        assert_eq!(read(d1.path()), read(d2.path()));
        let csv = std::fs::read_to_string(d1.path().join("series/1_over_a.csv")).unwrap();
        assert_eq!(csv.lines().count(), 6);
        assert_eq!(csv.lines().next(), Some("time,value"));
        assert!(compare_with_golden(d2.path(), d1.path()).unwrap().is_empty());
        std::fs::write(d2.path().join("series/b.csv"), "time,value\n").unwrap();
        assert_eq!(compare_with_golden(d2.path(), d1.path()).unwrap(), vec![PathBuf::from("series/b.csv")]);
    }
}
