//! The coercive variational problem for the velocity update:
//! `int Acoef^{jk} d_j vbar . d_k phi = int C . curl_eta(phi) J` for every
//! periodic `phi`, with `vbar` of zero mean.

use rayon::prelude::*;

use super::deriv::Differentiator;
use super::grid::{PeriodicField3D, Rank};
use super::kinematics::{cross, JacobianPack};
use crate::error::{Error, Result};
use crate::linalg::{pcg, CgOptions, LinearOperator};

#[derive(Debug, Clone, Copy)]
pub struct VariationalOptions {
    /// Relative residual target of each component solve.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariationalReport {
    pub iterations: [usize; 3],
    /// Largest final relative residual over the components.
    pub residual: f64,
}

/// `w -> -sum_k D_k (sum_j Acoef^{jk} D_j w)` on one scalar component.
struct StiffnessOperator<'a> {
    diff: &'a Differentiator,
    /// Entries (00, 01, 02, 11, 12, 22) of the symmetric coefficient.
    entries: [Vec<f64>; 6],
}

impl<'a> StiffnessOperator<'a> {
    fn new(pack: &JacobianPack, diff: &'a Differentiator) -> Self {
        let pick = |i: usize, j: usize| pack.coefficient.iter().map(|c| c[i][j]).collect::<Vec<f64>>();
        Self {
            diff,
            entries: [pick(0, 0), pick(0, 1), pick(0, 2), pick(1, 1), pick(1, 2), pick(2, 2)],
        }
    }

    fn entry(&self, j: usize, k: usize) -> &[f64] {
        let slot = match (j.min(k), j.max(k)) {
            (0, 0) => 0,
            (0, 1) => 1,
            (0, 2) => 2,
            (1, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        };
        &self.entries[slot]
    }
}

impl LinearOperator for StiffnessOperator<'_> {
    fn dim(&self) -> usize {
        self.diff.grid.nodes()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let grads: Vec<Vec<f64>> = (0..3).map(|j| self.diff.derivative(x, j)).collect();
        y.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..3 {
            let flux: Vec<f64> = (0..x.len())
                .into_par_iter()
                .map(|p| (0..3).map(|j| self.entry(j, k)[p] * grads[j][p]).sum())
                .collect();
            for (o, d) in y.iter_mut().zip(self.diff.derivative(&flux, k)) {
                *o -= d;
            }
        }
    }
}

/// Right side `b_k = -sum_r D_r (C x a_r)_k` with `a = J A` the cofactor
/// matrix and `a_r` its row `r`.
pub fn variational_rhs(pack: &JacobianPack, c: &PeriodicField3D, diff: &Differentiator) -> PeriodicField3D {
    let grid = c.grid;
    let n = grid.nodes();
    // q[r][k] = (C x a_r)_k per node
    let q: Vec<[[f64; 3]; 3]> = (0..n)
        .into_par_iter()
        .map(|p| {
            let cv = c.vector_at(p);
            let j = pack.det[p];
            let a = pack.inverse[p];
            [0, 1, 2].map(|r| cross(cv, [j * a[r][0], j * a[r][1], j * a[r][2]]))
        })
        .collect();
    let mut out = PeriodicField3D::zeros(grid, Rank::Vector);
    for k in 0..3 {
        let mut b = vec![0.0; n];
        for r in 0..3 {
            let comp: Vec<f64> = q.iter().map(|m| m[r][k]).collect();
            for (o, d) in b.iter_mut().zip(diff.derivative(&comp, r)) {
                *o -= d;
            }
        }
        out.component_mut(k).copy_from_slice(&b);
    }
    out
}

/// Solves for the zero-mean periodic update, starting from `guess` when given.
pub fn variational_solve(
    pack: &JacobianPack,
    c: &PeriodicField3D,
    diff: &Differentiator,
    guess: Option<&PeriodicField3D>,
    opts: VariationalOptions,
) -> Result<(PeriodicField3D, VariationalReport)> {
    let grid = c.grid;
    let op = StiffnessOperator::new(pack, diff);
    let pc = diff.inverse_laplacian();
    let mut rhs = variational_rhs(pack, c, diff);
    // components at round-off level relative to the largest are treated as
    // exactly zero; a relative tolerance on them would chase noise
    let norms: Vec<f64> = (0..3).map(|k| rhs.component(k).iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let largest = norms.iter().cloned().fold(0.0, f64::max);
    for (k, n) in norms.iter().enumerate() {
        if *n <= 1e-13 * largest {
            rhs.component_mut(k).iter_mut().for_each(|v| *v = 0.0);
        }
    }
    let cg = CgOptions {
        rel_tol: opts.rel_tol,
        max_iter: opts.max_iter,
        project_mean: true,
    };
    let results: Vec<Result<(Vec<f64>, usize, f64)>> = (0..3)
        .into_par_iter()
        .map(|k| {
            let mut x = guess.map_or_else(|| vec![0.0; grid.nodes()], |g| g.component(k).to_vec());
            let report = pcg(&op, &pc, rhs.component(k), &mut x, cg).map_err(|e| match e {
                Error::NotPositiveDefinite(msg) => {
                    let (lam, p) = pack.min_coefficient_eigenvalue();
                    let at = grid.point(p);
                    Error::NotPositiveDefinite(format!(
                        "{msg}; smallest coefficient eigenvalue {lam:e} at node {p} ({:.4}, {:.4}, {:.4})",
                        at[0], at[1], at[2]
                    ))
                }
                other => other,
            })?;
            Ok((x, report.iterations, report.residual))
        })
        .collect();
    let mut out = PeriodicField3D::zeros(grid, Rank::Vector);
    let mut report = VariationalReport::default();
    for (k, r) in results.into_iter().enumerate() {
        let (x, it, res) = r?;
        out.component_mut(k).copy_from_slice(&x);
        report.iterations[k] = it;
        report.residual = report.residual.max(res);
    }
    out.subtract_mean();
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian3d::deriv::DerivativeMethod;
    use crate::lagrangian3d::grid::Grid3;
    use std::f64::consts::PI;

    #[test]
    fn zero_vorticity_gives_zero() {
        let g = Grid3::cubic(8, 1.0).unwrap();
        let d = Differentiator::new(g, DerivativeMethod::Spectral);
        let c = PeriodicField3D::zeros(g, Rank::Vector);
        let (v, _) = variational_solve(&JacobianPack::identity(g), &c, &d, None, Default::default()).unwrap();
        assert!(v.data.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn recovers_closed_form_mode() {
        // curl C = (0, sin x1, 0) for C = (0, 0, cos x1), so vbar = (0, sin x1, 0)
        let g = Grid3::cubic(16, PI).unwrap();
        for method in [DerivativeMethod::Spectral, DerivativeMethod::FiniteDifference4] {
            let d = Differentiator::new(g, method);
            let c = PeriodicField3D::from_fn(g, Rank::Vector, |x, o| o[2] = x[0].cos());
            let (v, rep) = variational_solve(&JacobianPack::identity(g), &c, &d, None, Default::default()).unwrap();
            assert!(rep.residual <= 1e-10);
            let tol = if method == DerivativeMethod::Spectral { 1e-9 } else { 1e-2 };
            for p in 0..g.nodes() {
                let x = g.point(p);
                assert!((v.at(p, 1) - x[0].sin()).abs() < tol, "{method:?}");
                assert!(v.at(p, 0).abs() < 1e-9 && v.at(p, 2).abs() < 1e-9);
            }
        }
    }
}
