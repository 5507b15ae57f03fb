//! Time stepping of the patch boundary: classical RK4 on marker points, with
//! the markers re-fitted to the band limit after every step.

use serde::{Deserialize, Serialize};

use super::contour::{Contour, Vec2};
use super::monitor::{chord_arc, sobolev_norm};
use super::series::DiagnosticSeries;
use super::velocity::{boundary_velocity, velocity_gradient_sup, GradientNorm, PatchVorticity};
use crate::error::{Error, Result};
use crate::spectral;

/// Marker count for band limit `N`. Using `3N` markers and keeping only
/// `|n| <= N` on re-fit is the two-thirds de-aliasing rule.
pub fn marker_count(band: usize) -> usize {
    let m = 3 * band;
    (m + m % 2).max(8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    /// Steps whose result has a smaller chord-arc constant are rejected.
    pub min_chord_arc: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { min_chord_arc: 1e-3 }
    }
}

fn marker_spacing(points: &[Vec2]) -> f64 {
    let m = points.len();
    (0..m)
        .map(|j| {
            let a = points[j];
            let b = points[(j + 1) % m];
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .fold(f64::INFINITY, f64::min)
}

fn tangents_of(points: &[Vec2]) -> Vec<Vec2> {
    let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    let dx = spectral::derivative(&xs);
    let dy = spectral::derivative(&ys);
    dx.into_iter().zip(dy).map(|(a, b)| [a, b]).collect()
}

fn marker_velocity(points: &[Vec2], vort: PatchVorticity) -> Vec<Vec2> {
    boundary_velocity(points, &tangents_of(points), vort)
}

/// Largest time step allowed by the guard `dt * max|u| < marker spacing`.
pub fn max_stable_dt(contour: &Contour, vort: PatchVorticity) -> Result<f64> {
    let c = contour.canonical();
    let s = c.sample(marker_count(c.band()))?;
    let u = marker_velocity(&s.points, vort);
    let umax = u.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    if umax == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(marker_spacing(&s.points) / umax)
}

pub fn step(contour: &Contour, vort: PatchVorticity, dt: f64) -> Result<Contour> {
    step_with(contour, vort, dt, &StepOptions::default())
}

pub fn step_with(contour: &Contour, vort: PatchVorticity, dt: f64, opts: &StepOptions) -> Result<Contour> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Precondition(format!("time step must be positive, got {dt}")));
    }
    if vort.is_quiescent() {
        return Ok(contour.clone().with_time(contour.time + dt));
    }
    let c = contour.canonical();
    let band = c.band();
    let m = marker_count(band);
    let x0 = c.sample(m)?.points;

    let k1 = marker_velocity(&x0, vort);
    let umax = k1.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    let spacing = marker_spacing(&x0);
    if dt * umax >= spacing {
        return Err(Error::Precondition(format!(
            "time step {dt} violates the guard dt * max|u| = {:e} < marker spacing {spacing:e}",
            dt * umax
        )));
    }
    let shifted = |k: &[Vec2], f: f64| -> Vec<Vec2> {
        x0.iter()
            .zip(k)
            .map(|(p, v)| [p[0] + f * dt * v[0], p[1] + f * dt * v[1]])
            .collect()
    };
    let k2 = marker_velocity(&shifted(&k1, 0.5), vort);
    let k3 = marker_velocity(&shifted(&k2, 0.5), vort);
    let k4 = marker_velocity(&shifted(&k3, 1.0), vort);
    let next: Vec<Vec2> = (0..m)
        .map(|j| {
            let mut p = x0[j];
            for c in 0..2 {
                p[c] += dt / 6.0 * (k1[j][c] + 2.0 * k2[j][c] + 2.0 * k3[j][c] + k4[j][c]);
            }
            p
        })
        .collect();
    let out = Contour::from_samples(&next, band)?.with_time(contour.time + dt);
    let ca = chord_arc(&out);
    if ca.self_intersecting || ca.value < opts.min_chord_arc {
        return Err(Error::StepRejected(format!(
            "chord-arc constant {:e} below threshold {:e}",
            ca.value, opts.min_chord_arc
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub t_end: f64,
    /// Fixed step; `None` picks `cfl` times the guard limit of the initial contour.
    pub dt: Option<f64>,
    pub cfl: f64,
    /// Record monitors every this many steps (the final state is always recorded).
    pub monitor_every: usize,
    /// Sobolev order of the boundary monitor, `k - 1/2`.
    pub sobolev_order: f64,
    /// Sample cloud for the gradient monitor; empty selects a default cloud.
    pub gradient_samples: Vec<Vec2>,
    pub gradient_norm: GradientNorm,
    /// Record the F(t) summands (the gradient monitor is the costly one).
    pub monitor_f: bool,
    pub step: StepOptions,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt: None,
            cfl: 0.5,
            monitor_every: 1,
            sobolev_order: 2.5,
            gradient_samples: Vec::new(),
            gradient_norm: GradientNorm::MaxEntry,
            monitor_f: false,
            step: StepOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub initial: Contour,
    pub last: Contour,
    /// Contours at the monitored times.
    pub snapshots: Vec<Contour>,
    pub series: DiagnosticSeries,
    pub dt: f64,
    pub steps: usize,
}

/// Rings at 0.6 and 1.5 times the centroid distance of the boundary, plus the centroid.
pub fn default_gradient_samples(contour: &Contour) -> Vec<Vec2> {
    let g = contour.centroid();
    let s = contour.sample(32.max(2 * contour.band() + 1)).expect("grid exceeds 2N+1");
    let step = (s.points.len() / 32).max(1);
    let mut out = vec![g];
    for p in s.points.iter().step_by(step) {
        for f in [0.6, 1.5] {
            out.push([g[0] + f * (p[0] - g[0]), g[1] + f * (p[1] - g[1])]);
        }
    }
    out
}

fn record(series: &mut DiagnosticSeries, c: &Contour, vort: PatchVorticity, opts: &EvolveOptions, samples: &[Vec2]) -> Result<()> {
    let t = c.time;
    series.push(t, "area", c.area());
    let ca = chord_arc(c);
    series.push(t, "chord_arc", ca.value);
    series.push(t, "min_metric", c.min_metric());
    if opts.monitor_f {
        series.push(t, "1/chord_arc", 1.0 / ca.value);
        series.push(t, "sobolev_norm", sobolev_norm(c, opts.sobolev_order));
        series.push(
            t,
            "grad_sup",
            velocity_gradient_sup(c, vort, samples, opts.gradient_norm)?,
        );
    }
    Ok(())
}

pub fn evolve(contour: &Contour, vort: PatchVorticity, opts: &EvolveOptions) -> Result<Evolution> {
    if !(opts.t_end >= 0.0) {
        return Err(Error::Precondition("final time must be non-negative".into()));
    }
    let start = contour.canonical();
    let dt = match opts.dt {
        Some(dt) => dt,
        None => {
            let lim = max_stable_dt(&start, vort)?;
            if lim.is_finite() {
                opts.cfl * lim
            } else {
                opts.t_end.max(1e-3) / 10.0
            }
        }
    };
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!("time step must be positive, got {dt}")));
    }
    let steps = (opts.t_end / dt).ceil() as usize;
    let dt = if steps > 0 { opts.t_end / steps as f64 } else { dt };
    let samples = if opts.gradient_samples.is_empty() {
        default_gradient_samples(&start)
    } else {
        opts.gradient_samples.clone()
    };
    let t0 = start.time;
    let mut series = DiagnosticSeries::default();
    let mut snapshots = vec![start.clone()];
    record(&mut series, &start, vort, opts, &samples)?;
    let mut c = start.clone();
    let every = opts.monitor_every.max(1);
    for i in 1..=steps {
        c = step_with(&c, vort, dt, &opts.step)?;
        c.time = t0 + i as f64 * dt;
        if i % every == 0 || i == steps {
            record(&mut series, &c, vort, opts, &samples)?;
            snapshots.push(c.clone());
        }
    }
    Ok(Evolution {
        initial: start,
        last: c,
        snapshots,
        series,
        dt,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour2d::contour::hausdorff_distance;

    #[test]
    fn quiescent_patch_is_unchanged_exactly() {
        let c = Contour::ellipse(2.0, 1.0, 16);
        let out = step(&c, PatchVorticity::uniform(0.0), 0.1).unwrap();
        assert_eq!(out.coeffs(), c.coeffs());
    }

    #[test]
    fn rankine_disk_is_stationary() {
        let c = Contour::circle(1.0, 32);
        let dt = 0.5 * max_stable_dt(&c, PatchVorticity::default()).unwrap();
        let out = step(&c, PatchVorticity::default(), dt).unwrap();
        assert!(hausdorff_distance(&c, &out) < 1e-10);
        // RK4 shrinks the rotation radius by O(dt^6) per step
        assert!((out.area() - c.area()).abs() < 1e-9);
    }

    #[test]
    fn oversized_step_is_refused() {
        let c = Contour::circle(1.0, 32);
        assert!(matches!(
            step(&c, PatchVorticity::default(), 10.0),
            Err(Error::Precondition(_))
        ));
        assert!(step(&c, PatchVorticity::default(), -0.1).is_err());
    }
}
