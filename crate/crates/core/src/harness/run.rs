//! Dispatch of a validated scenario to its module and collection of metrics.

use std::collections::BTreeMap;
use std::path::Path;

use log::info;

use super::oracle::{ellipse_probes, ellipse_velocity};
use super::report::RunReport;
use super::scenario::{ContourSpec, EllipticCase, Module, Scenario};
use crate::contour2d::shape::{kirchhoff_rate, record_shape, rotation_fit};
use crate::contour2d::{checkpoint, evolve, hausdorff_distance, patch_velocity, DiagnosticSeries, EvolveOptions, PatchVorticity};
use crate::error::{Error, Result};
use crate::flatten::checks::{boundary_jacobian_error, interface_mismatch};
use crate::flatten::{
    default_outer_radius, roughening_family, sobolev_gain_ratio, solve_annulus_extension, solve_disk_extension,
};
use crate::lagrangian3d::{
    euler_diagnostics, jacobian_pack, level_series, picard_solve, snapshot, Evolve3dConfig, Preset,
};
use crate::linalg::CgOptions;
use crate::twophase::{
    convergence_study, export, mesh_from_contour, rankine_study, solve_weak, Degree, ManufacturedCase, RateTable,
    SolveOptions,
};

/// A file produced by a run, named relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub series: DiagnosticSeries,
    pub artifacts: Vec<Artifact>,
}

#[derive(Default)]
struct Measured {
    metrics: BTreeMap<String, f64>,
    series: DiagnosticSeries,
    artifacts: Vec<Artifact>,
}

impl Measured {
    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    fn artifact(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.artifacts.push(Artifact {
            name: format!("artifacts/{name}"),
            bytes: bytes.into(),
        });
    }
}

/// Validates and runs a scenario. Relative paths inside it resolve against `base`.
pub fn run(scenario: &Scenario, base: &Path) -> Result<RunOutput> {
    scenario.validate()?;
    info!("running scenario {} ({})", scenario.name, scenario.module.name());
    let m = match scenario.module {
        Module::Contour2d => run_contour2d(scenario, base)?,
        Module::Flatten => run_flatten(scenario, base)?,
        Module::Twophase => run_twophase(scenario)?,
        Module::Lagrangian3d => run_lagrangian3d(scenario, base)?,
    };
    let names = m.artifacts.iter().map(|a| a.name.clone()).collect();
    Ok(RunOutput {
        report: RunReport::evaluate(scenario, &m.metrics, names),
        series: m.series,
        artifacts: m.artifacts,
    })
}

/// Loads, applies overrides, validates and runs a scenario file.
pub fn run_file(path: &Path, overrides: &[String]) -> Result<RunOutput> {
    let scenario = Scenario::load(path, overrides)?;
    run(&scenario, path.parent().unwrap_or(Path::new(".")))
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn ellipse_axes(spec: &ContourSpec) -> Option<(f64, f64)> {
    match spec {
        ContourSpec::Circle { radius, .. } => Some((*radius, *radius)),
        ContourSpec::Ellipse { a, b, .. } => Some((*a, *b)),
        _ => None,
    }
}

fn run_contour2d(s: &Scenario, base: &Path) -> Result<Measured> {
    let spec = s.contour.as_ref().expect("validated");
    let p = s.simulate2d.as_ref().expect("validated");
    let contour = spec.build(base)?;
    let vort = PatchVorticity {
        omega_plus: p.omega_plus,
        omega_minus: p.omega_minus,
    };
    let mut out = Measured::default();
    if p.velocity_probes > 0 {
        let (a, b) = ellipse_axes(spec)
            .ok_or_else(|| Error::Precondition("velocity probes need a circle or ellipse contour".into()))?;
        if vort.omega_minus != 0.0 {
            return Err(Error::Precondition("velocity probes need zero background vorticity".into()));
        }
        let mut worst = 0.0f64;
        for x in ellipse_probes(a, b, p.velocity_probes) {
            let u = patch_velocity(&contour, vort, x)?;
            let e = ellipse_velocity(a, b, vort.jump(), x);
            worst = worst.max((u[0] - e[0]).abs()).max((u[1] - e[1]).abs());
        }
        out.metric("velocity_oracle_error", worst);
    }
    let opts = EvolveOptions {
        t_end: p.t_end,
        dt: p.dt,
        cfl: p.cfl,
        monitor_every: p.monitor_every,
        sobolev_order: p.sobolev_order,
        monitor_f: p.monitor_f,
        ..Default::default()
    };
    let ev = evolve(&contour, vort, &opts)?;
    let area0 = ev.initial.area();
    out.metric("steps", ev.steps as f64);
    out.metric("dt", ev.dt);
    out.metric("boundary_drift", max_of(ev.snapshots.iter().map(|c| hausdorff_distance(&ev.initial, c))));
    out.metric("area_drift", max_of(ev.snapshots.iter().map(|c| (c.area() - area0).abs())));
    out.metric(
        "min_chord_arc",
        ev.series.get("chord_arc").iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
    );
    let mut series = ev.series.clone();
    if p.monitor_f {
        let parts: Vec<Vec<(f64, f64)>> =
            ["1/chord_arc", "sobolev_norm", "grad_sup"].iter().map(|n| series.get(n)).collect();
        let total = (0..parts[0].len()).map(|i| parts.iter().map(|q| q[i].1).sum::<f64>());
        out.metric("monitor_f_max", max_of(total));
    }
    if let ContourSpec::Ellipse { a, b, .. } = spec {
        if a != b && ev.snapshots.len() >= 3 {
            record_shape(&mut series, &ev.snapshots);
            let fit = rotation_fit(&ev.snapshots);
            let expect = kirchhoff_rate(*a, *b, vort.jump());
            out.metric("rotation_rate", fit.rate);
            out.metric("kirchhoff_rate", expect);
            out.metric("rotation_rate_rel_error", (fit.rate - expect).abs() / expect.abs());
            out.metric("max_deformation", fit.max_deformation);
        }
    }
    out.series = series;
    out.artifact("initial.contour", checkpoint::to_text(&ev.initial));
    out.artifact("final.contour", checkpoint::to_text(&ev.last));
    Ok(out)
}

fn run_flatten(s: &Scenario, base: &Path) -> Result<Measured> {
    let p = s.flatten.as_ref().expect("validated");
    let contour = s.contour.as_ref().expect("validated").build(base)?;
    let mut out = Measured::default();
    let disk = solve_disk_extension(&contour);
    let radius = p.outer_radius.unwrap_or_else(|| default_outer_radius(&contour));
    let annulus = solve_annulus_extension(&contour, radius)?;
    out.metric("disk_boundary_jacobian_error", boundary_jacobian_error(&disk, &contour, p.samples)?);
    out.metric("annulus_boundary_jacobian_error", boundary_jacobian_error(&annulus, &contour, p.samples)?);
    let (value, radial) = interface_mismatch(&disk, &annulus, p.samples)?;
    out.metric("interface_value_mismatch", value);
    out.metric("interface_radial_mismatch", radial);
    out.metric("disk_condition", disk.condition);
    out.metric("annulus_condition", annulus.condition);
    if let Some(f) = &p.family {
        let ratios = sobolev_gain_ratio(&roughening_family(f.k, f.members, f.band, f.seed), f.k);
        for (i, r) in ratios.iter().enumerate() {
            out.series.push(i as f64, "gain_ratio", *r);
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = max_of(ratios.iter().cloned());
        out.metric("gain_ratio_min", lo);
        out.metric("gain_ratio_max", hi);
        out.metric("gain_ratio_spread", hi / lo);
    }
    out.artifact("disk.map", crate::flatten::to_text(&disk));
    out.artifact("annulus.map", crate::flatten::to_text(&annulus));
    Ok(out)
}

/// Rows pushed with the mesh size as the abscissa, coarse to fine reversed so
/// that the abscissa increases.
fn push_rates(series: &mut DiagnosticSeries, prefix: &str, t: &RateTable) {
    for r in t.rows.iter().rev() {
        for (name, v) in [("l2", r.l2), ("h1", r.h1), ("energy", r.energy), ("flux_jump", r.flux_jump)] {
            series.push(r.h, &format!("{prefix}{name}_error"), v);
        }
    }
}

fn manufactured(case: EllipticCase, member: usize, seed: u64) -> Result<ManufacturedCase> {
    Ok(match case {
        EllipticCase::Kinked => ManufacturedCase::kinked_circle(),
        EllipticCase::Cubic => ManufacturedCase::cubic_circle(),
        EllipticCase::Periodic => ManufacturedCase::periodic_kinked(),
        EllipticCase::Rough => {
            let family = roughening_family(3, ROUGH_FAMILY, 128, seed);
            let rough = family.get(member).ok_or_else(|| {
                Error::Precondition(format!("rough member {member} outside the {ROUGH_FAMILY}-member family"))
            })?;
            ManufacturedCase::rough_coefficient(rough)?
        }
        EllipticCase::RankineStream | EllipticCase::RankineVelocity => unreachable!("closed-form cases"),
    })
}

/// Size of the roughening family the rough-coefficient case draws from.
pub const ROUGH_FAMILY: usize = 10;

fn run_twophase(s: &Scenario) -> Result<Measured> {
    let p = s.twophase.as_ref().expect("validated");
    let opts = SolveOptions {
        degree: if p.degree == 2 { Degree::P2 } else { Degree::P1 },
        cg: CgOptions::default(),
    };
    let mut out = Measured::default();
    match p.case {
        EllipticCase::RankineStream | EllipticCase::RankineVelocity => {
            let (radius, modes) = match &s.contour {
                None => (1.0, 8),
                Some(ContourSpec::Circle { radius, modes }) => (*radius, *modes),
                Some(_) => return Err(Error::Precondition("the Rankine cases need a circle contour".into())),
            };
            let velocity = p.case == EllipticCase::RankineVelocity;
            let study = rankine_study(radius, modes, &p.hs, opts, velocity)?;
            for r in study.rows.iter().rev() {
                out.series.push(r.h, "stream_l2_error", r.stream_l2);
                out.series.push(r.h, "drop_error", r.drop_error);
                if velocity {
                    out.series.push(r.h, "jump_l2_error", r.jump_l2);
                    out.series.push(r.h, "tangential_jump", r.tangential_jump);
                }
            }
            let finest = study.rows.last().expect("at least 3 sizes");
            out.metric("stream_l2_rate", study.stream_rate);
            out.metric("drop_error_finest", finest.drop_error.abs());
            out.metric("drop_error_over_h2", max_of(study.rows.iter().map(|r| r.drop_error.abs() / (r.h * r.h))));
            if velocity {
                out.metric("jump_l2_rate", study.jump_rate);
                out.metric("jump_l2_over_h", max_of(study.rows.iter().map(|r| r.jump_l2 / r.h)));
                out.metric("tangential_jump", finest.tangential_jump);
                out.metric("tangential_jump_error", (finest.tangential_jump + 1.0).abs());
            }
            out.artifact("rates.csv", study.to_csv());
            if p.export {
                let c = crate::contour2d::Contour::circle(radius, modes);
                let mesh = mesh_from_contour(&c, finest.h, crate::twophase::OuterBoundary::default_ball(&c))?;
                let vort = PatchVorticity::default();
                let sol = if velocity {
                    crate::twophase::solve_velocity_2d(&mesh, vort, opts)?
                } else {
                    crate::twophase::solve_stream_2d(&mesh, vort, opts)?
                };
                push_mesh(&mut out, &mesh, &sol);
            }
        }
        case => {
            let mc = manufactured(case, p.member, p.seed)?;
            let table = convergence_study(&mc, &p.hs, opts)?;
            push_rates(&mut out.series, "", &table);
            out.metric("l2_rate", table.l2_rate);
            out.metric("h1_rate", table.h1_rate);
            out.metric("energy_rate", table.energy_rate);
            out.metric("flux_rate", table.flux_rate);
            out.metric("monotone", f64::from(u8::from(table.monotone)));
            out.artifact("rates.csv", table.to_csv());
            if case == EllipticCase::Rough {
                let baseline = convergence_study(&ManufacturedCase::kinked_circle(), &p.hs, opts)?;
                push_rates(&mut out.series, "baseline_", &baseline);
                out.metric("baseline_l2_rate", baseline.l2_rate);
                out.metric("baseline_h1_rate", baseline.h1_rate);
                out.metric("l2_rate_drop", baseline.l2_rate - table.l2_rate);
                out.metric("h1_rate_drop", baseline.h1_rate - table.h1_rate);
                out.artifact("baseline_rates.csv", baseline.to_csv());
            }
            if p.export {
                let h = table.rows.last().expect("at least 3 sizes").h;
                let mesh = mesh_from_contour(&mc.contour, h, mc.outer)?;
                let sol = solve_weak(&mc.problem, &mesh, opts)?;
                push_mesh(&mut out, &mesh, &sol);
            }
        }
    }
    Ok(out)
}

fn push_mesh(out: &mut Measured, mesh: &crate::twophase::InterfaceMesh, sol: &crate::twophase::TwoPhaseSolution) {
    out.artifact("vertices.csv", export::vertices_csv(mesh));
    out.artifact("cells.csv", export::cells_csv(mesh));
    out.artifact("solution.csv", export::solution_csv(sol));
}

fn resolve_preset(config: &Evolve3dConfig, base: &Path) -> Evolve3dConfig {
    let mut c = config.clone();
    if let Preset::File { path } = &mut c.preset {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
    c
}

/// Largest value over time levels of every diagnostic at the fixed point of `config`.
struct Solved {
    worst: BTreeMap<&'static str, f64>,
}

fn solve3d(config: &Evolve3dConfig, out: Option<&mut Measured>) -> Result<Option<Solved>> {
    let data = config.data()?;
    let diff = config.differentiator()?;
    let (state, report) = match picard_solve(&data, &diff, config.picard()) {
        Ok(r) => r,
        Err(Error::NonContraction { factors }) => {
            if let Some(out) = out {
                out.metric("picard_converged", 0.0);
                out.metric("picard_max_factor", max_of(factors.iter().cloned()));
                for (i, f) in factors.iter().enumerate() {
                    out.series.push((i + 2) as f64, "picard_factor", *f);
                }
            }
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let levels = level_series(&state, &data, &diff)?;
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    for l in &levels {
        for (name, v) in l.named() {
            let e = worst.entry(name).or_insert(0.0);
            *e = e.max(v);
        }
    }
    if let Some(out) = out {
        out.metric("picard_converged", 1.0);
        out.metric("picard_iterations", report.iterations as f64);
        out.metric("picard_final_difference", *report.differences.last().unwrap_or(&0.0));
        out.metric("picard_max_factor", max_of(report.factors.iter().cloned()));
        let monotone = report.differences.windows(2).all(|w| w[1] < w[0]);
        out.metric("picard_monotone", f64::from(u8::from(monotone)));
        for (i, d) in report.differences.iter().enumerate() {
            out.series.push((i + 1) as f64, "picard_difference", *d);
        }
        for (i, f) in report.factors.iter().enumerate() {
            out.series.push((i + 2) as f64, "picard_factor", *f);
        }
        let mut lambda = f64::INFINITY;
        let mut gradient = 0.0f64;
        for d in &state.displacement {
            let pack = jacobian_pack(d, &diff)?;
            lambda = lambda.min(pack.min_coefficient_eigenvalue().0);
            gradient = gradient.max(pack.displacement_gradient_sup());
        }
        out.metric("min_coefficient_eigenvalue", lambda);
        out.metric("max_displacement_gradient", gradient);
        for (name, v) in &worst {
            out.metric(name, *v);
        }
        let norm0 = data.omega0.l2_norm();
        out.metric(
            "vorticity_mean_relative",
            if norm0 > 0.0 { worst["vorticity_mean"] / norm0 } else { worst["vorticity_mean"] },
        );
        out.series.extend(&euler_diagnostics(&state, &data, &diff)?);
        let last = state.times.len() - 1;
        let t = state.times[last];
        out.artifact("omega0.vpf3", snapshot::encode(&data.omega0, 0.0));
        out.artifact("velocity_final.vpf3", snapshot::encode(&state.velocity[last], t));
        out.artifact("displacement_final.vpf3", snapshot::encode(&state.displacement[last], t));
    }
    Ok(Some(Solved { worst }))
}

fn run_lagrangian3d(s: &Scenario, base: &Path) -> Result<Measured> {
    let config = resolve_preset(s.evolve3d.as_ref().expect("validated"), base);
    let mut out = Measured::default();
    solve3d(&config, Some(&mut out))?;
    if let Some(r) = &s.refinement {
        // the smoothing band stays fixed so only the discretisation changes
        let band = config.band_width()?;
        let mut rows = Vec::new();
        for (&n, &m) in r.grids.iter().zip(&r.levels) {
            let c = Evolve3dConfig {
                grid: n,
                levels: m,
                band: Some(band),
                ..config.clone()
            };
            let solved = solve3d(&c, None)?.ok_or_else(|| {
                Error::Precondition(format!("refinement run on {n}^3 did not converge; shorten the horizon"))
            })?;
            for name in ["divergence", "jacobian_defect", "cauchy_residual", "tangency"] {
                out.series.push(n as f64, &format!("refinement_{name}"), solved.worst[name]);
            }
            rows.push((n, solved));
        }
        for name in ["divergence", "jacobian_defect", "cauchy_residual", "tangency"] {
            let order = rows
                .windows(2)
                .map(|w| (w[0].1.worst[name] / w[1].1.worst[name]).ln() / (w[1].0 as f64 / w[0].0 as f64).ln())
                .fold(f64::INFINITY, f64::min);
            out.metric(&format!("{name}_order"), order);
        }
    }
    Ok(out)
}
