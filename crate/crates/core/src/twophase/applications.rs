//! The stream-function and velocity interface problems of a 2-D patch.
//!
//! Stream function: `Delta psi = omega` phase-wise with no jumps, so in the
//! weak form the forcing is `f+ = -omega+`, `f- = -omega-`. Velocity:
//! each component harmonic in each phase with `[d_N u] = -[omega] tau`, where
//! `tau = (N_2, -N_1)`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::jump::{interface_gradients, interface_mean};
use super::mesh::{InterfaceMesh, OuterBoundary, Phase};
use super::problem::{solve_weak, Component, SolveOptions, TwoPhaseProblem, TwoPhaseSolution};
use super::space::Locator;
use super::JumpSample;
use crate::contour2d::{PatchVorticity, Vec2};
use crate::error::{Error, Result};

/// Tangent paired with the outward normal in the velocity jump condition.
pub fn interface_tangent(normal: Vec2) -> Vec2 {
    [normal[1], -normal[0]]
}

fn box_area(mesh: &InterfaceMesh) -> Option<f64> {
    match mesh.outer {
        OuterBoundary::PeriodicBox { half_width } => Some(4.0 * half_width * half_width),
        OuterBoundary::Ball { .. } => None,
    }
}

/// Stream function of the patch on `mesh`. On a ball the outer data is the
/// far field `(Gamma / 2 pi) log|x - c|` of the equivalent point vortex at
/// the centroid; on a periodic box the vorticity is shifted to zero mean.
pub fn solve_stream_2d(mesh: &InterfaceMesh, vort: PatchVorticity, opts: SolveOptions) -> Result<TwoPhaseSolution> {
    let contour = &mesh.contour;
    let area = contour.area();
    let centroid = contour.centroid();
    let shift = match box_area(mesh) {
        Some(total) => {
            if vort.omega_minus != 0.0 {
                return Err(Error::Precondition(
                    "background vorticity is not supported on the periodic box".into(),
                ));
            }
            vort.omega_plus * area / total
        }
        None => 0.0,
    };
    let (wp, wm) = (vort.omega_plus, vort.omega_minus);
    let circulation = vort.jump() * area;
    let comp = Component {
        forcing: Arc::new(move |_, p| match p {
            Phase::Plus => -(wp - shift),
            Phase::Minus => -(wm - shift),
        }),
        jump: Arc::new(|_, _| 0.0),
        boundary: Arc::new(move |x| {
            let d = [x[0] - centroid[0], x[1] - centroid[1]];
            let r2 = d[0] * d[0] + d[1] * d[1];
            circulation / (4.0 * PI) * r2.ln() + 0.25 * wm * (x[0] * x[0] + x[1] * x[1])
        }),
    };
    solve_weak(&TwoPhaseProblem::scalar(comp), mesh, opts)
}

/// Velocity `grad^perp psi = (-d_2 psi, d_1 psi)` from recovered gradients.
pub fn stream_velocity(sol: &TwoPhaseSolution, mesh: &InterfaceMesh, points: &[Vec2]) -> Vec<Option<Vec2>> {
    let loc = Locator::new(mesh);
    let rec = sol.recovered_gradients(mesh, 0);
    points
        .iter()
        .map(|&x| sol.smooth_gradient_at(mesh, &loc, &rec, x).map(|g| [-g[1], g[0]]))
        .collect()
}

/// Velocity field of the patch as a two-component interface problem. The
/// sign of the measured curl jump is checked against the vorticity jump.
pub fn solve_velocity_2d(mesh: &InterfaceMesh, vort: PatchVorticity, opts: SolveOptions) -> Result<TwoPhaseSolution> {
    let contour = &mesh.contour;
    let jump = vort.jump();
    if box_area(mesh).is_some() && vort.omega_minus != 0.0 {
        return Err(Error::Precondition(
            "background vorticity is not supported on the periodic box".into(),
        ));
    }
    let circulation = jump * contour.area();
    let centroid = contour.centroid();
    let wm = vort.omega_minus;
    let component = |c: usize| Component {
        forcing: Arc::new(|_, _| 0.0),
        jump: Arc::new(move |_, n| -jump * interface_tangent(n)[c]),
        boundary: Arc::new(move |x| {
            let d = [x[0] - centroid[0], x[1] - centroid[1]];
            let r2 = d[0] * d[0] + d[1] * d[1];
            let far = [-d[1], d[0]][c] * circulation / (2.0 * PI * r2);
            far + 0.5 * wm * [-x[1], x[0]][c]
        }),
    };
    let problem = TwoPhaseProblem {
        coefficient: Default::default(),
        components: vec![component(0), component(1)],
    };
    let sol = solve_weak(&problem, mesh, opts)?;
    if jump != 0.0 {
        let measured = curl_jump(&sol, mesh);
        if measured.signum() != jump.signum() || (measured - jump).abs() > 0.5 * jump.abs() {
            return Err(Error::Orientation(format!(
                "measured curl jump {measured:.4} against vorticity jump {jump:.4}"
            )));
        }
    }
    Ok(sol)
}

/// Length-weighted mean of `[curl u] = [d_1 u_2 - d_2 u_1]` along the interface.
pub fn curl_jump(sol: &TwoPhaseSolution, mesh: &InterfaceMesh) -> f64 {
    let g0 = interface_gradients(sol, mesh, 0);
    let g1 = interface_gradients(sol, mesh, 1);
    let samples: Vec<JumpSample> = mesh
        .interface
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let curl = |side: usize| g1[k][side][0] - g0[k][side][1];
            let (point, normal) = mesh.interface_frame(e, 0.5);
            JumpSample {
                edge: k,
                point,
                normal,
                length: mesh.edge_length(e),
                value: vec![curl(0) - curl(1)],
            }
        })
        .collect();
    interface_mean(&samples, |s| s.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour2d::Contour;
    use crate::twophase::mesh::mesh_from_contour;

    #[test]
    fn rankine_stream_center_value() {
        let m = mesh_from_contour(&Contour::circle(1.0, 4), 0.1, OuterBoundary::Ball { radius: 8.0 }).unwrap();
        let s = solve_stream_2d(&m, PatchVorticity::default(), SolveOptions::default()).unwrap();
        let loc = Locator::new(&m);
        let center = s.value_at(&m, &loc, [0.0, 0.0], 0).unwrap();
        let on_curve = s.value_at(&m, &loc, [1.0, 0.0], 0).unwrap();
        assert!((center - on_curve + 0.25).abs() < 0.01, "{}", center - on_curve);
        let u = stream_velocity(&s, &m, &[[0.5, 0.0]])[0].unwrap();
        assert!(u[0].abs() < 0.01 && (u[1] - 0.25).abs() < 0.01, "{u:?}");
    }

    #[test]
    fn rankine_velocity_jump_sign() {
        let m = mesh_from_contour(&Contour::circle(1.0, 4), 0.1, OuterBoundary::Ball { radius: 8.0 }).unwrap();
        let s = solve_velocity_2d(&m, PatchVorticity::default(), SolveOptions::default()).unwrap();
        assert!((curl_jump(&s, &m) - 1.0).abs() < 0.1);
    }
}
