//! Picard iteration `v -> vbar` on a uniform time grid.

use log::{debug, info};
use rayon::prelude::*;

use super::data::PatchData3D;
use super::deriv::Differentiator;
use super::grid::{Grid3, PeriodicField3D};
use super::kinematics::{flow_map, jacobian_pack, transported_vorticity};
use super::solve::{variational_solve, VariationalOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    /// Final time `T`.
    pub horizon: f64,
    /// Number of time steps `M`; the grid has `M + 1` levels.
    pub levels: usize,
    /// Stop once the largest per-level L2 change is at most this.
    pub tol: f64,
    pub max_iterations: usize,
    pub solve: VariationalOptions,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            horizon: 0.1,
            levels: 4,
            tol: 1e-8,
            max_iterations: 50,
            solve: VariationalOptions::default(),
        }
    }
}

impl PicardOptions {
    pub fn times(&self) -> Vec<f64> {
        (0..=self.levels).map(|m| self.horizon * m as f64 / self.levels as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Precondition(format!("time horizon must be positive, got {}", self.horizon)));
        }
        if self.levels == 0 {
            return Err(Error::Precondition("need at least one time step".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Precondition(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Velocity and displacement `eta - x` at every time level.
#[derive(Debug, Clone)]
pub struct LagrangianState {
    pub grid: Grid3,
    pub times: Vec<f64>,
    pub velocity: Vec<PeriodicField3D>,
    pub displacement: Vec<PeriodicField3D>,
}

impl LagrangianState {
    /// The initial guess: `u0` held constant in time.
    pub fn seeded(data: &PatchData3D, times: Vec<f64>) -> Self {
        let velocity = vec![data.u0.clone(); times.len()];
        let displacement = flow_map(&times, &velocity);
        Self {
            grid: data.grid,
            times,
            velocity,
            displacement,
        }
    }

    /// Largest L2 distance between matching velocity levels.
    pub fn distance(&self, other: &[PeriodicField3D]) -> f64 {
        self.velocity.iter().zip(other).map(|(a, b)| a.l2_distance(b)).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PicardReport {
    pub iterations: usize,
    /// `sup_m |v_new - v_old|_L2` per iteration.
    pub differences: Vec<f64>,
    /// Ratios of consecutive differences.
    pub factors: Vec<f64>,
    /// Conjugate-gradient iterations summed over levels and components, per iteration.
    pub cg_iterations: Vec<usize>,
}

/// One application of the map: new velocities at every level together with
/// the total conjugate-gradient iteration count.
pub fn picard_step(
    data: &PatchData3D,
    state: &LagrangianState,
    diff: &Differentiator,
    opts: VariationalOptions,
) -> Result<(Vec<PeriodicField3D>, usize)> {
    let results: Vec<Result<(PeriodicField3D, usize)>> = state
        .displacement
        .par_iter()
        .zip(&state.velocity)
        .map(|(disp, v)| {
            let pack = jacobian_pack(disp, diff)?;
            pack.check_guard()?;
            let c = transported_vorticity(&pack, &data.omega0);
            let (vbar, rep) = variational_solve(&pack, &c, diff, Some(v), opts)?;
            Ok((vbar, rep.iterations.iter().sum()))
        })
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut cg = 0;
    for r in results {
        let (v, it) = r?;
        out.push(v);
        cg += it;
    }
    Ok((out, cg))
}

/// Iterates from `v = u0` until successive velocity series agree to `tol`.
pub fn picard_solve(data: &PatchData3D, diff: &Differentiator, opts: PicardOptions) -> Result<(LagrangianState, PicardReport)> {
    opts.validate()?;
    let mut state = LagrangianState::seeded(data, opts.times());
    let mut report = PicardReport::default();
    for it in 1..=opts.max_iterations {
        let (next, cg) = picard_step(data, &state, diff, opts.solve)?;
        let d = state.distance(&next);
        if let Some(prev) = report.differences.last() {
            report.factors.push(if *prev > 0.0 { d / prev } else { 0.0 });
        }
        report.differences.push(d);
        report.cg_iterations.push(cg);
        report.iterations = it;
        debug!("picard iteration {it}: change {d:e}, {cg} cg iterations");
        state.velocity = next;
        state.displacement = flow_map(&state.times, &state.velocity);
        if d <= opts.tol {
            info!("picard converged after {it} iterations (change {d:e})");
            return Ok((state, report));
        }
    }
    Err(Error::NonContraction { factors: report.factors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian3d::deriv::DerivativeMethod;

    #[test]
    fn zero_data_is_a_fixed_point_after_one_iteration() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let d = Differentiator::new(g, DerivativeMethod::Spectral);
        let (state, rep) = picard_solve(&PatchData3D::zero(g), &d, PicardOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.differences, vec![0.0]);
        assert!(state.velocity.iter().all(|v| v.data.iter().all(|x| *x == 0.0)));
    }

    #[test]
    fn nonpositive_horizon_is_rejected() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let d = Differentiator::new(g, DerivativeMethod::Spectral);
        let opts = PicardOptions { horizon: -1.0, ..Default::default() };
        assert!(matches!(picard_solve(&PatchData3D::zero(g), &d, opts), Err(Error::Precondition(_))));
    }
}
