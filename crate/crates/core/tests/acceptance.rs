//! Acceptance criteria 1 to 10, one test each. Every test runs the scenario
//! presets it covers, checks the measured values against the bounds written
//! here (not against the preset thresholds alone) and prints one line:
//!
//! ```text
//! criterion 3 biot-savart oracle: PASS (velocity_oracle_error = 6.4e-16 <= 1e-6)
//! ```
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see the lines.

use std::path::{Path, PathBuf};

use vortex_patch::contour2d::{checkpoint, shape::kirchhoff_rate};
use vortex_patch::harness::{compare_with_golden, run_file, write_run, RunOutput};

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

fn run(name: &str, overrides: &[&str]) -> RunOutput {
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    run_file(&preset(name), &overrides).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn metric(out: &RunOutput, name: &str) -> f64 {
    out.report
        .metric(name)
        .unwrap_or_else(|| panic!("{}: no metric {name}", out.report.scenario.name))
}

enum Bound {
    Max(f64),
    Min(f64),
    Within(f64, f64),
}

struct Check {
    label: String,
    value: f64,
    bound: Bound,
}

impl Check {
    fn holds(&self) -> bool {
        match self.bound {
            Bound::Max(b) => self.value <= b,
            Bound::Min(b) => self.value >= b,
            Bound::Within(lo, hi) => (lo..=hi).contains(&self.value),
        }
    }

    fn describe(&self) -> String {
        match self.bound {
            Bound::Max(b) => format!("{} = {:.3e} <= {b:e}", self.label, self.value),
            Bound::Min(b) => format!("{} = {:.4} >= {b}", self.label, self.value),
            Bound::Within(lo, hi) => format!("{} = {:.4} in [{lo}, {hi}]", self.label, self.value),
        }
    }
}

fn check(label: impl Into<String>, value: f64, bound: Bound) -> Check {
    Check {
        label: label.into(),
        value,
        bound,
    }
}

fn from(out: &RunOutput, name: &str, bound: Bound) -> Check {
    check(format!("{}/{name}", out.report.scenario.name), metric(out, name), bound)
}

/// Prints the one-line verdict, then fails the test if any check fails.
fn verdict(number: u32, title: &str, checks: &[Check]) {
    let ok = checks.iter().all(Check::holds);
    let detail: Vec<String> = checks
        .iter()
        .map(|c| if c.holds() { c.describe() } else { format!("FAILED {}", c.describe()) })
        .collect();
    println!("criterion {number} {title}: {} ({})", if ok { "PASS" } else { "FAIL" }, detail.join("; "));
    assert!(ok, "criterion {number} failed: {}", detail.join("; "));
}

#[test]
fn criterion_01_rankine_stationarity() {
    let out = run("rankine-stationarity", &[]);
    verdict(
        1,
        "rankine stationarity",
        &[
            from(&out, "boundary_drift", Bound::Max(1e-8)),
            from(&out, "area_drift", Bound::Max(1e-10)),
        ],
    );
}

#[test]
fn criterion_02_kirchhoff_rotation() {
    let exact = kirchhoff_rate(1.0, 0.5, 1.0);
    assert!((exact - 2.0 / 9.0).abs() < 1e-15);
    let period = run("kirchhoff-2to1", &[]);
    // self-convergence: four times the modes over a short window at the finer guarded step
    let fine = run(
        "kirchhoff-2to1",
        &["contour.modes=512", "simulate2d.t_end=0.2", "simulate2d.monitor_every=11"],
    );
    let (coarse_rate, fine_rate) = (metric(&period, "rotation_rate"), metric(&fine, "rotation_rate"));
    verdict(
        2,
        "kirchhoff rotation",
        &[
            from(&period, "rotation_rate_rel_error", Bound::Max(0.01)),
            from(&period, "max_deformation", Bound::Max(1e-3)),
            check("N=512 rate relative to 2/9", (fine_rate - exact).abs() / exact, Bound::Max(0.01)),
            check("N=128 vs N=512 rate", (coarse_rate - fine_rate).abs() / fine_rate, Bound::Max(1e-3)),
        ],
    );
}

#[test]
fn criterion_03_biot_savart_oracle() {
    let out = run("biot-savart-oracle", &[]);
    verdict(3, "biot-savart oracle", &[from(&out, "velocity_oracle_error", Bound::Max(1e-6))]);
}

#[test]
fn criterion_04_boundary_jacobian() {
    let mut checks = Vec::new();
    for name in ["boundary-jacobian-circle", "boundary-jacobian-perturbed"] {
        let out = run(name, &[]);
        checks.push(from(&out, "disk_boundary_jacobian_error", Bound::Max(1e-8)));
        checks.push(from(&out, "annulus_boundary_jacobian_error", Bound::Max(1e-8)));
    }
    verdict(4, "boundary jacobian identity", &checks);
}

#[test]
fn criterion_05_half_derivative_gain() {
    let out = run("half-derivative-gain", &[]);
    let ratios = out.series.get("gain_ratio");
    verdict(
        5,
        "half-derivative gain",
        &[
            check("family members", ratios.len() as f64, Bound::Within(10.0, 10.0)),
            from(&out, "gain_ratio_spread", Bound::Max(10.0)),
        ],
    );
}

#[test]
fn criterion_06_two_phase_stream() {
    let out = run("rankine-stream", &[]);
    verdict(
        6,
        "two-phase stream solve",
        &[
            from(&out, "stream_l2_rate", Bound::Min(1.8)),
            from(&out, "drop_error_over_h2", Bound::Max(0.25)),
        ],
    );
}

#[test]
fn criterion_07_velocity_jump() {
    let out = run("rankine-velocity-jump", &[]);
    verdict(
        7,
        "velocity jump identity",
        &[
            from(&out, "jump_l2_rate", Bound::Min(0.8)),
            from(&out, "jump_l2_over_h", Bound::Max(2.0)),
            from(&out, "tangential_jump", Bound::Within(-1.05, -0.95)),
        ],
    );
}

#[test]
fn criterion_08_manufactured_convergence() {
    let p1 = run("manufactured-p1", &[]);
    let p2 = run("manufactured-p2", &[]);
    let periodic = run("manufactured-periodic", &[]);
    let rough = run("rough-coefficient", &[]);
    verdict(
        8,
        "manufactured convergence",
        &[
            from(&p1, "l2_rate", Bound::Within(1.8, 2.2)),
            from(&p1, "h1_rate", Bound::Within(0.8, 1.2)),
            from(&p1, "flux_rate", Bound::Min(0.8)),
            from(&p1, "monotone", Bound::Min(1.0)),
            from(&periodic, "l2_rate", Bound::Within(1.8, 2.2)),
            from(&periodic, "h1_rate", Bound::Within(0.8, 1.2)),
            from(&p2, "l2_rate", Bound::Min(2.6)),
            from(&p2, "h1_rate", Bound::Min(1.6)),
            from(&rough, "l2_rate_drop", Bound::Max(0.2)),
            from(&rough, "h1_rate_drop", Bound::Max(0.2)),
        ],
    );
}

#[test]
fn criterion_09_three_d_picard() {
    let zero = run("picard-zero", &[]);
    let ball = run("picard-ball", &[]);
    let ring = run("picard-ring", &[]);
    let refined = run("picard-refinement", &[]);
    verdict(
        9,
        "3-d picard",
        &[
            from(&zero, "picard_iterations", Bound::Max(1.0)),
            from(&zero, "picard_final_difference", Bound::Max(0.0)),
            from(&zero, "vorticity_norm", Bound::Max(0.0)),
            from(&ball, "picard_converged", Bound::Min(1.0)),
            from(&ball, "picard_monotone", Bound::Min(1.0)),
            from(&ball, "max_displacement_gradient", Bound::Max(0.5)),
            from(&ring, "picard_converged", Bound::Min(1.0)),
            from(&ring, "picard_monotone", Bound::Min(1.0)),
            from(&ring, "picard_max_factor", Bound::Max(0.5)),
            from(&refined, "divergence_order", Bound::Min(1.0)),
            from(&refined, "jacobian_defect_order", Bound::Min(1.0)),
            from(&refined, "cauchy_residual_order", Bound::Min(1.0)),
        ],
    );
}

#[test]
fn criterion_10_invariant_battery() {
    let monitor = run("breakdown-monitor", &[]);
    let ball = run("picard-ball", &[]);
    let again = run("picard-ball", &[]);

    // realness: the evolved contour keeps conjugate-symmetric coefficients
    let last = monitor.artifacts.iter().find(|a| a.name.ends_with("final.contour")).expect("final contour");
    let c = checkpoint::from_text(std::str::from_utf8(&last.bytes).unwrap()).unwrap();
    let band = c.band() as i64;
    let asymmetry = (1..=band)
        .flat_map(|n| {
            let (p, m) = (c.coeff(n), c.coeff(-n));
            [(p[0] - m[0].conj()).norm(), (p[1] - m[1].conj()).norm()]
        })
        .fold(0.0, f64::max);

    // determinism: byte-identical outputs from two independent runs
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_run(a.path(), &ball).unwrap();
    write_run(b.path(), &again).unwrap();
    let differing = compare_with_golden(b.path(), a.path()).unwrap();

    verdict(
        10,
        "invariant battery",
        &[
            check("final contour conjugate asymmetry", asymmetry, Bound::Max(0.0)),
            from(&monitor, "area_drift", Bound::Max(1e-8)),
            from(&monitor, "min_chord_arc", Bound::Min(0.1)),
            from(&ball, "vorticity_mean_relative", Bound::Max(1e-12)),
            from(&ball, "min_coefficient_eigenvalue", Bound::Min(0.25)),
            from(&ball, "support_leak", Bound::Max(0.0)),
            check("files differing between reruns", differing.len() as f64, Bound::Max(0.0)),
        ],
    );
}
