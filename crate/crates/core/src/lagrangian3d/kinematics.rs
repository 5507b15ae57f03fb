//! Flow map, deformation tensors and transported vorticity.

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;

use super::deriv::Differentiator;
use super::grid::{Grid3, Mat3, PeriodicField3D, Rank, Vec3};
use crate::error::{Error, Result};

const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Displacements `eta(x, t_m) - x` from velocity samples on the time grid by
/// the trapezoidal rule; the first entry is exactly zero.
pub fn flow_map(times: &[f64], velocity: &[PeriodicField3D]) -> Vec<PeriodicField3D> {
    assert_eq!(times.len(), velocity.len());
    assert!(!times.is_empty());
    let mut out = vec![PeriodicField3D::zeros(velocity[0].grid, Rank::Vector)];
    for m in 1..times.len() {
        let half = 0.5 * (times[m] - times[m - 1]);
        let prev = &out[m - 1];
        let data = prev
            .data
            .par_iter()
            .zip(&velocity[m - 1].data)
            .zip(&velocity[m].data)
            .map(|((d, a), b)| d + half * (a + b))
            .collect();
        out.push(PeriodicField3D {
            grid: prev.grid,
            rank: Rank::Vector,
            data,
        });
    }
    out
}

fn to_na(m: &Mat3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j])
}

fn from_na(m: &Matrix3<f64>) -> Mat3 {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)]))
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn mat_vec(a: &Mat3, v: Vec3) -> Vec3 {
    [0, 1, 2].map(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

pub fn transpose(a: &Mat3) -> Mat3 {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| a[j][i]))
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &Mat3) -> f64 {
    let a = to_na(m);
    let sym = 0.5 * (a + a.transpose());
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// Deformation quantities at every node: `grad[i][r] = d eta_i / d x_r`,
/// `inverse = A = grad^-1`, `det = J`, `coefficient = J A A^T`.
#[derive(Debug, Clone)]
pub struct JacobianPack {
    pub grid: Grid3,
    pub grad: Vec<Mat3>,
    pub inverse: Vec<Mat3>,
    pub det: Vec<f64>,
    pub coefficient: Vec<Mat3>,
}

impl JacobianPack {
    /// Builds the pack from deformation gradients. Any node with `J <= 0`
    /// is a guard violation.
    pub fn from_gradients(grid: Grid3, grad: Vec<Mat3>) -> Result<Self> {
        assert_eq!(grad.len(), grid.nodes());
        let rows: Vec<Option<(Mat3, f64, Mat3)>> = grad
            .par_iter()
            .map(|g| {
                let m = to_na(g);
                let det = m.determinant();
                if !(det > 0.0) {
                    return None;
                }
                let a = m.try_inverse()?;
                let big = a * a.transpose() * det;
                // symmetric by construction; average off-diagonal roundoff away
                let big = 0.5 * (big + big.transpose());
                Some((from_na(&a), det, from_na(&big)))
            })
            .collect();
        let mut inverse = Vec::with_capacity(grad.len());
        let mut det = Vec::with_capacity(grad.len());
        let mut coefficient = Vec::with_capacity(grad.len());
        for (p, r) in rows.into_iter().enumerate() {
            let Some((a, j, c)) = r else {
                let x = grid.point(p);
                return Err(Error::JacobianGuard(format!(
                    "det grad eta = {:e} <= 0 at node {p} ({:.4}, {:.4}, {:.4}); reduce the time horizon",
                    to_na(&grad[p]).determinant(),
                    x[0],
                    x[1],
                    x[2]
                )));
            };
            inverse.push(a);
            det.push(j);
            coefficient.push(c);
        }
        Ok(Self {
            grid,
            grad,
            inverse,
            det,
            coefficient,
        })
    }

    pub fn identity(grid: Grid3) -> Self {
        let n = grid.nodes();
        Self {
            grid,
            grad: vec![IDENTITY; n],
            inverse: vec![IDENTITY; n],
            det: vec![1.0; n],
            coefficient: vec![IDENTITY; n],
        }
    }

    /// `max over nodes of |grad eta - I|` (Frobenius).
    pub fn displacement_gradient_sup(&self) -> f64 {
        self.grad
            .par_iter()
            .map(|g| {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        s += (g[i][j] - IDENTITY[i][j]).powi(2);
                    }
                }
                s.sqrt()
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Smallest eigenvalue of the coefficient over all nodes, and where it occurs.
    pub fn min_coefficient_eigenvalue(&self) -> (f64, usize) {
        self.coefficient
            .par_iter()
            .enumerate()
            .map(|(p, c)| (min_eigenvalue(c), p))
            .reduce(|| (f64::INFINITY, 0), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
    }

    /// `max over nodes and entries of |A grad eta - I|`.
    pub fn inverse_defect(&self) -> f64 {
        self.inverse
            .par_iter()
            .zip(&self.grad)
            .map(|(a, g)| {
                let p = mat_mul(a, g);
                let mut m = 0.0f64;
                for i in 0..3 {
                    for j in 0..3 {
                        m = m.max((p[i][j] - IDENTITY[i][j]).abs());
                    }
                }
                m
            })
            .reduce(|| 0.0, f64::max)
    }

    /// `max over nodes of |J - 1|`.
    pub fn volume_defect(&self) -> f64 {
        self.det.iter().fold(0.0, |m, j| m.max((j - 1.0).abs()))
    }

    /// Rejects deformations outside the coercive regime: `|grad eta - I| <= 1/2`
    /// and smallest coefficient eigenvalue at least `1/4`.
    pub fn check_guard(&self) -> Result<()> {
        let sup = self.displacement_gradient_sup();
        if sup > 0.5 {
            return Err(Error::JacobianGuard(format!(
                "|grad eta - I| reaches {sup:.4} > 1/2; reduce the time horizon"
            )));
        }
        let (lam, p) = self.min_coefficient_eigenvalue();
        if lam < 0.25 {
            return Err(Error::JacobianGuard(format!(
                "coefficient eigenvalue {lam:.4} < 1/4 at node {p}; reduce the time horizon"
            )));
        }
        Ok(())
    }
}

/// Deformation quantities of a periodic displacement `eta - x`.
pub fn jacobian_pack(displacement: &PeriodicField3D, diff: &Differentiator) -> Result<JacobianPack> {
    let g = diff.gradient(displacement);
    let grad = (0..g.grid.nodes())
        .map(|p| {
            let mut m = g.matrix_at(p);
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += 1.0;
            }
            m
        })
        .collect();
    JacobianPack::from_gradients(g.grid, grad)
}

/// `[curl_eta F]_i = eps_ijk (dF_k / dx_r) A_rj` for a single node, with
/// `g[k][r] = dF_k / dx_r`.
pub fn curl_eta_at(g: &Mat3, a: &Mat3) -> Vec3 {
    let m = mat_mul(g, a);
    [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]]
}

pub fn curl_eta(f: &PeriodicField3D, inverse: &[Mat3], diff: &Differentiator) -> PeriodicField3D {
    let g = diff.gradient(f);
    let grid = f.grid;
    let rows: Vec<Vec3> = (0..grid.nodes())
        .into_par_iter()
        .map(|p| curl_eta_at(&g.matrix_at(p), &inverse[p]))
        .collect();
    vector_field(grid, &rows)
}

/// `C = grad eta . omega0` node by node; zero wherever `omega0` is zero.
pub fn transported_vorticity(pack: &JacobianPack, omega0: &PeriodicField3D) -> PeriodicField3D {
    let rows: Vec<Vec3> = (0..pack.grid.nodes())
        .into_par_iter()
        .map(|p| {
            let w = omega0.vector_at(p);
            if w == [0.0; 3] {
                [0.0; 3]
            } else {
                mat_vec(&pack.grad[p], w)
            }
        })
        .collect();
    vector_field(pack.grid, &rows)
}

pub(crate) fn vector_field(grid: Grid3, rows: &[Vec3]) -> PeriodicField3D {
    let comps = (0..3).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
    PeriodicField3D::from_components(grid, comps).expect("three components")
}
