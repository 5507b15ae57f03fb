//! Checkable consequences of a fixed point, one value per time level.
//!
//! Series names:
//! * `divergence` `|tr(A grad v)|_L2`
//! * `jacobian_defect` `max |J - 1|`
//! * `cauchy_residual` `|curl_eta v - grad eta . omega0|_L2`
//! * `tangency` largest `|C . n|` over the sample surface, `n = A^T N / |A^T N|`
//! * `vorticity_mean` `|int C|`
//! * `vorticity_norm` `|C|_L2`
//! * `support_leak` largest `|C|` on minus-phase nodes

use nalgebra::Matrix3;
use rayon::prelude::*;

use super::data::PatchData3D;
use super::deriv::Differentiator;
use super::grid::{Mat3, PeriodicField3D};
use super::kinematics::{curl_eta_at, jacobian_pack, transported_vorticity};
use super::picard::LagrangianState;
use crate::contour2d::DiagnosticSeries;
use crate::error::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LevelDiagnostics {
    pub divergence: f64,
    pub jacobian_defect: f64,
    pub cauchy_residual: f64,
    pub tangency: f64,
    pub vorticity_mean: f64,
    pub vorticity_norm: f64,
    pub support_leak: f64,
}

impl LevelDiagnostics {
    pub fn named(&self) -> [(&'static str, f64); 7] {
        [
            ("divergence", self.divergence),
            ("jacobian_defect", self.jacobian_defect),
            ("cauchy_residual", self.cauchy_residual),
            ("tangency", self.tangency),
            ("vorticity_mean", self.vorticity_mean),
            ("vorticity_norm", self.vorticity_norm),
            ("support_leak", self.support_leak),
        ]
    }
}

fn tangency(c: &PeriodicField3D, data: &PatchData3D, diff: &Differentiator, disp: &PeriodicField3D) -> f64 {
    if data.surface.vertices.is_empty() {
        return 0.0;
    }
    let grad = diff.gradient(disp);
    data.surface
        .vertices
        .par_iter()
        .zip(&data.surface.normals)
        .map(|(x, nref)| {
            let g = Matrix3::from_fn(|i, j| grad.interpolate(3 * i + j, *x) + if i == j { 1.0 } else { 0.0 });
            let Some(a) = g.try_inverse() else {
                return f64::INFINITY;
            };
            // n_i = A_ki N_k, the pushed-forward normal direction
            let n = [0, 1, 2].map(|i| (0..3).map(|k| a[(k, i)] * nref[k]).sum::<f64>());
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            let cv = [0, 1, 2].map(|k| c.interpolate(k, *x));
            (cv[0] * n[0] + cv[1] * n[1] + cv[2] * n[2]).abs() / len
        })
        .reduce(|| 0.0, f64::max)
}

/// Diagnostics of one time level.
pub fn level_diagnostics(
    data: &PatchData3D,
    velocity: &PeriodicField3D,
    displacement: &PeriodicField3D,
    diff: &Differentiator,
) -> Result<LevelDiagnostics> {
    let grid = data.grid;
    let pack = jacobian_pack(displacement, diff)?;
    let c = transported_vorticity(&pack, &data.omega0);
    let gv = diff.gradient(velocity);
    let dv = grid.cell_volume();
    // collected before summing so the reduction order is fixed
    let terms: Vec<(f64, f64)> = (0..grid.nodes())
        .into_par_iter()
        .map(|p| {
            let g: Mat3 = gv.matrix_at(p);
            let a = &pack.inverse[p];
            let tr: f64 = (0..3).map(|i| (0..3).map(|r| g[i][r] * a[r][i]).sum::<f64>()).sum();
            let curl = curl_eta_at(&g, a);
            let cp = c.vector_at(p);
            let res: f64 = (0..3).map(|k| (curl[k] - cp[k]).powi(2)).sum();
            (tr * tr, res)
        })
        .collect();
    let div2: f64 = terms.iter().map(|t| t.0).sum();
    let cauchy2: f64 = terms.iter().map(|t| t.1).sum();
    let integral = c.integral();
    let support_leak = (0..grid.nodes())
        .filter(|&p| !data.support[p])
        .map(|p| c.vector_at(p).iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max);
    Ok(LevelDiagnostics {
        divergence: (dv * div2).sqrt(),
        jacobian_defect: pack.volume_defect(),
        cauchy_residual: (dv * cauchy2).sqrt(),
        tangency: tangency(&c, data, diff, displacement),
        vorticity_mean: integral.iter().map(|v| v * v).sum::<f64>().sqrt(),
        vorticity_norm: c.l2_norm(),
        support_leak,
    })
}

/// Per-level diagnostics of a state, in time order.
pub fn level_series(state: &LagrangianState, data: &PatchData3D, diff: &Differentiator) -> Result<Vec<LevelDiagnostics>> {
    state
        .velocity
        .iter()
        .zip(&state.displacement)
        .map(|(v, d)| level_diagnostics(data, v, d, diff))
        .collect()
}

/// Diagnostics as named time series.
pub fn euler_diagnostics(state: &LagrangianState, data: &PatchData3D, diff: &Differentiator) -> Result<DiagnosticSeries> {
    let mut out = DiagnosticSeries::default();
    for (t, d) in state.times.iter().zip(level_series(state, data, diff)?) {
        for (name, v) in d.named() {
            out.push(*t, name, v);
        }
    }
    Ok(out)
}
