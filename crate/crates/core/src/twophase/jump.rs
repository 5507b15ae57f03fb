//! Interface traces of a discrete solution.

use super::mesh::InterfaceMesh;
use super::problem::{apply, edge_barycentric, TwoPhaseSolution};
use super::space::element;
use crate::contour2d::Vec2;
use crate::twophase::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpQuantity {
    /// `u+ - u-` at the edge midpoint.
    Value,
    /// `(grad u+ - grad u-) . N`
    NormalDerivative,
    /// `(a+ grad u+ - a- grad u-) . N`
    Flux,
}

/// One sample per interface edge, taken at the edge midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSample {
    pub edge: usize,
    /// Point on the curve at the middle parameter of the edge.
    pub point: Vec2,
    pub normal: Vec2,
    pub length: f64,
    /// One entry per solution component.
    pub value: Vec<f64>,
}

/// Trace of `comp` on an interface edge from the element `cell`; terms are
/// summed in dof order so both sides round identically.
fn trace(sol: &TwoPhaseSolution, mesh: &InterfaceMesh, cell: usize, ends: [usize; 2], s: f64, comp: usize) -> f64 {
    let e = element(mesh, cell);
    let (v, _) = e.shape(sol.space.degree, edge_barycentric(mesh, cell, ends, s));
    let mut terms: Vec<(usize, f64)> = sol
        .space
        .local_dofs(cell)
        .iter()
        .enumerate()
        .filter(|(i, _)| v[*i] != 0.0)
        .map(|(i, &d)| (d, v[i] * sol.values[comp][d]))
        .collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    terms.iter().map(|t| t.1).sum()
}

/// One-sided traces measured per interface edge. Gradients on each side are
/// the area-weighted averages over the edge endpoints' element patches in
/// that phase, averaged between the two endpoints.
pub fn measure_interface_jump(sol: &TwoPhaseSolution, mesh: &InterfaceMesh, quantity: JumpQuantity) -> Vec<JumpSample> {
    let nc = sol.components();
    let recovered: Vec<_> = match quantity {
        JumpQuantity::Value => Vec::new(),
        _ => (0..nc).map(|c| sol.recovered_gradients(mesh, c)).collect(),
    };
    mesh.interface
        .iter()
        .enumerate()
        .map(|(k, edge)| {
            let (point, normal) = mesh.interface_frame(edge, 0.5);
            let value = (0..nc)
                .map(|c| match quantity {
                    JumpQuantity::Value => {
                        trace(sol, mesh, edge.plus, edge.vertices, 0.5, c)
                            - trace(sol, mesh, edge.minus, edge.vertices, 0.5, c)
                    }
                    _ => {
                        let side = |p: Phase| {
                            let r = &recovered[c][p.index()];
                            let a = r[edge.vertices[0]].unwrap_or([0.0; 2]);
                            let b = r[edge.vertices[1]].unwrap_or([0.0; 2]);
                            let g = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                            let g = if quantity == JumpQuantity::Flux {
                                apply(&sol.coefficient.at(point, p), g)
                            } else {
                                g
                            };
                            g[0] * normal[0] + g[1] * normal[1]
                        };
                        side(Phase::Plus) - side(Phase::Minus)
                    }
                })
                .collect();
            JumpSample {
                edge: k,
                point,
                normal,
                length: mesh.edge_length(edge),
                value,
            }
        })
        .collect()
}

/// One-sided recovered gradients at the edge midpoints, `[plus, minus]`.
pub fn interface_gradients(sol: &TwoPhaseSolution, mesh: &InterfaceMesh, comp: usize) -> Vec<[Vec2; 2]> {
    let r = sol.recovered_gradients(mesh, comp);
    mesh.interface
        .iter()
        .map(|edge| {
            let side = |p: Phase| {
                let a = r[p.index()][edge.vertices[0]].unwrap_or([0.0; 2]);
                let b = r[p.index()][edge.vertices[1]].unwrap_or([0.0; 2]);
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
            };
            [side(Phase::Plus), side(Phase::Minus)]
        })
        .collect()
}

/// `(sum_edges length * |sample - target|^2)^(1/2)`, the `L^2` distance along the interface.
pub fn jump_l2_error<F: Fn(Vec2, Vec2) -> Vec<f64>>(samples: &[JumpSample], target: F) -> f64 {
    samples
        .iter()
        .map(|s| {
            let t = target(s.point, s.normal);
            s.length * s.value.iter().zip(&t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        })
        .sum::<f64>()
        .sqrt()
}

/// Length-weighted mean of `f(sample)` over the interface.
pub fn interface_mean<F: Fn(&JumpSample) -> f64>(samples: &[JumpSample], f: F) -> f64 {
    let total: f64 = samples.iter().map(|s| s.length).sum();
    samples.iter().map(|s| s.length * f(s)).sum::<f64>() / total
}
