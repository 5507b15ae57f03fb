//! Error measures of the stream and velocity problems on the circular patch,
//! whose solution is known in closed form.

use super::applications::{interface_tangent, solve_stream_2d, solve_velocity_2d};
use super::jump::{interface_mean, jump_l2_error, measure_interface_jump, JumpQuantity};
use super::mesh::{mesh_from_contour, InterfaceMesh, OuterBoundary};
use super::problem::{SolveOptions, TwoPhaseSolution};
use super::space::Locator;
use crate::contour2d::shape::linear_slope;
use crate::contour2d::{Contour, PatchVorticity};
use crate::error::{Error, Result};

/// Stream function of a disk of radius `a` and vorticity `omega` centred at
/// the origin, normalised so that `psi = (omega a^2 / 2) log r` outside.
pub fn rankine_stream(a: f64, omega: f64, r: f64) -> f64 {
    if r >= a {
        0.5 * omega * a * a * r.ln()
    } else {
        0.25 * omega * (r * r - a * a) + 0.5 * omega * a * a * a.ln()
    }
}

/// Lumped-mass nodal `L^2` error: every triangle gives a third of its area
/// to each corner value.
pub fn lumped_nodal_l2<F: Fn(crate::contour2d::Vec2) -> f64>(mesh: &InterfaceMesh, sol: &TwoPhaseSolution, comp: usize, exact: F) -> f64 {
    let mut sum = 0.0;
    for (k, t) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = t.map(|v| mesh.vertices[v]);
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
        for (i, v) in t.iter().enumerate() {
            let d = sol.space.cell_dofs[k][i];
            let e = sol.values[comp][d] - exact(mesh.vertices[*v]);
            sum += area / 3.0 * e * e;
        }
    }
    sum.sqrt()
}

/// `psi(centre) - mean of psi over interface vertices`.
pub fn stream_drop(mesh: &InterfaceMesh, sol: &TwoPhaseSolution, centre: crate::contour2d::Vec2) -> Result<f64> {
    let loc = Locator::new(mesh);
    let at_centre = sol
        .value_at(mesh, &loc, centre, 0)
        .ok_or_else(|| Error::InvalidInput(format!("centre {centre:?} is not in the mesh")))?;
    let on_curve: Vec<f64> = (0..mesh.vertices.len())
        .filter(|&v| mesh.interface_param[v].is_some())
        .map(|v| sol.values[0][sol.space.vertex_dof[v]])
        .collect();
    Ok(at_centre - on_curve.iter().sum::<f64>() / on_curve.len() as f64)
}

/// `L^2(Gamma)` distance of the measured normal-derivative jump from `-[omega] tau`.
pub fn normal_jump_error(mesh: &InterfaceMesh, sol: &TwoPhaseSolution, jump: f64) -> f64 {
    let samples = measure_interface_jump(sol, mesh, JumpQuantity::NormalDerivative);
    jump_l2_error(&samples, |_, n| {
        let t = interface_tangent(n);
        vec![-jump * t[0], -jump * t[1]]
    })
}

/// Length-weighted mean of `[d_N u] . tau`, which should equal `-[omega]`.
pub fn tangential_jump(mesh: &InterfaceMesh, sol: &TwoPhaseSolution) -> f64 {
    let samples = measure_interface_jump(sol, mesh, JumpQuantity::NormalDerivative);
    interface_mean(&samples, |s| {
        let t = interface_tangent(s.normal);
        s.value[0] * t[0] + s.value[1] * t[1]
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankineRow {
    pub h: f64,
    pub stream_l2: f64,
    /// `psi(0) - psi(Gamma)` minus its exact value `-omega a^2 / 4`.
    pub drop_error: f64,
    pub jump_l2: f64,
    pub tangential_jump: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankineStudy {
    pub rows: Vec<RankineRow>,
    pub stream_rate: f64,
    pub jump_rate: f64,
}

impl RankineStudy {
    /// `h,stream_l2,drop_error,jump_l2,tangential_jump` rows followed by a `rate` row.
    pub fn to_csv(&self) -> String {
        use crate::textio::fmt17;
        let mut s = String::from("h,stream_l2,drop_error,jump_l2,tangential_jump\n");
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{}\n",
                fmt17(r.h),
                fmt17(r.stream_l2),
                fmt17(r.drop_error),
                fmt17(r.jump_l2),
                fmt17(r.tangential_jump)
            );
        }
        s += &format!("rate,{},,{},\n", fmt17(self.stream_rate), fmt17(self.jump_rate));
        s
    }
}

/// Stream and velocity solves on a disk of radius `a` for each mesh size.
/// `with_velocity = false` skips the velocity problem and leaves its columns NaN.
pub fn rankine_study(a: f64, modes: usize, hs: &[f64], opts: SolveOptions, with_velocity: bool) -> Result<RankineStudy> {
    if hs.len() < 2 {
        return Err(Error::Precondition(format!("need at least 2 mesh sizes, got {}", hs.len())));
    }
    let contour = Contour::circle(a, modes);
    let vort = PatchVorticity::default();
    let omega = vort.jump();
    let mut rows = Vec::with_capacity(hs.len());
    for &h in hs {
        let mesh = mesh_from_contour(&contour, h, OuterBoundary::default_ball(&contour))?;
        let psi = solve_stream_2d(&mesh, vort, opts)?;
        let stream_l2 = lumped_nodal_l2(&mesh, &psi, 0, |x| rankine_stream(a, omega, x[0].hypot(x[1])));
        let drop_error = stream_drop(&mesh, &psi, [0.0, 0.0])? + 0.25 * omega * a * a;
        let (jump_l2, tangential) = if with_velocity {
            let u = solve_velocity_2d(&mesh, vort, opts)?;
            (normal_jump_error(&mesh, &u, omega), tangential_jump(&mesh, &u))
        } else {
            (f64::NAN, f64::NAN)
        };
        log::info!("rankine h = {h}: stream {stream_l2:e}, drop {drop_error:e}, jump {jump_l2:e}");
        rows.push(RankineRow {
            h,
            stream_l2,
            drop_error,
            jump_l2,
            tangential_jump: tangential,
        });
    }
    let lh: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
    let slope = |f: fn(&RankineRow) -> f64| linear_slope(&lh, &rows.iter().map(|r| f(r).ln()).collect::<Vec<_>>());
    Ok(RankineStudy {
        stream_rate: slope(|r| r.stream_l2),
        jump_rate: slope(|r| r.jump_l2),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_is_continuous_with_continuous_slope() {
        let (a, w) = (1.3, 2.0);
        let e = 1e-7;
        assert!((rankine_stream(a, w, a - e) - rankine_stream(a, w, a + e)).abs() < 1e-6);
        let d_in = (rankine_stream(a, w, a) - rankine_stream(a, w, a - e)) / e;
        let d_out = (rankine_stream(a, w, a + e) - rankine_stream(a, w, a)) / e;
        assert!((d_in - d_out).abs() < 1e-5);
    }

    #[test]
    fn coarse_study_runs() {
        let s = rankine_study(1.0, 8, &[0.4, 0.2], SolveOptions::default(), true).unwrap();
        assert_eq!(s.rows.len(), 2);
        assert!(s.rows[1].stream_l2 < s.rows[0].stream_l2);
        assert!((s.rows[1].tangential_jump + 1.0).abs() < 0.2, "{:?}", s.rows[1]);
    }
}
