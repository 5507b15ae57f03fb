//! Lagrange P1/P2 spaces on an interface mesh and point location.

use std::collections::{BTreeMap, HashMap};

use super::mesh::{signed_area, InterfaceMesh};
use crate::contour2d::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Degree {
    #[default]
    P1,
    P2,
}

impl Degree {
    pub fn local_count(self) -> usize {
        match self {
            Degree::P1 => 3,
            Degree::P2 => 6,
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Degree::P1 => 1,
            Degree::P2 => 2,
        }
    }
}

/// Affine element data: vertex coordinates, area and barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub points: [Vec2; 3],
    pub area: f64,
    pub grad_bary: [Vec2; 3],
}

impl Element {
    pub fn new(points: [Vec2; 3]) -> Self {
        let [a, b, c] = points;
        let two_a = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        let g = |p: Vec2, q: Vec2| [(p[1] - q[1]) / two_a, (q[0] - p[0]) / two_a];
        Self {
            points,
            area: 0.5 * two_a,
            grad_bary: [g(b, c), g(c, a), g(a, b)],
        }
    }

    pub fn point(&self, bary: [f64; 3]) -> Vec2 {
        let mut p = [0.0; 2];
        for i in 0..3 {
            p[0] += bary[i] * self.points[i][0];
            p[1] += bary[i] * self.points[i][1];
        }
        p
    }

    pub fn barycentric(&self, p: Vec2) -> [f64; 3] {
        let mut l = [0.0; 3];
        for i in 0..3 {
            let q = self.points[(i + 1) % 3];
            l[i] = self.grad_bary[i][0] * (p[0] - q[0]) + self.grad_bary[i][1] * (p[1] - q[1]);
        }
        l
    }

    pub fn centroid(&self) -> Vec2 {
        self.point([1.0 / 3.0; 3])
    }

    /// Shape function values and gradients; P2 edge functions follow the
    /// vertices, edge `k` joining local vertices `k` and `k + 1`.
    pub fn shape(&self, degree: Degree, l: [f64; 3]) -> ([f64; 6], [Vec2; 6]) {
        let gl = self.grad_bary;
        let mut v = [0.0; 6];
        let mut g = [[0.0; 2]; 6];
        match degree {
            Degree::P1 => {
                for i in 0..3 {
                    v[i] = l[i];
                    g[i] = gl[i];
                }
            }
            Degree::P2 => {
                for i in 0..3 {
                    v[i] = l[i] * (2.0 * l[i] - 1.0);
                    let s = 4.0 * l[i] - 1.0;
                    g[i] = [s * gl[i][0], s * gl[i][1]];
                    let j = (i + 1) % 3;
                    v[3 + i] = 4.0 * l[i] * l[j];
                    g[3 + i] = [
                        4.0 * (l[i] * gl[j][0] + l[j] * gl[i][0]),
                        4.0 * (l[i] * gl[j][1] + l[j] * gl[i][1]),
                    ];
                }
            }
        }
        (v, g)
    }
}

/// Global numbering of the degrees of freedom.
#[derive(Debug, Clone)]
pub struct Space {
    pub degree: Degree,
    pub cell_dofs: Vec<[usize; 6]>,
    pub ndof: usize,
    /// A representative coordinate for each dof.
    pub dof_points: Vec<Vec2>,
    /// Dof sits on the outer Dirichlet boundary.
    pub on_outer: Vec<bool>,
    /// Dof lies on the interface (vertex with a contour parameter, or P2 interface edge).
    pub on_interface: Vec<bool>,
    /// Dof carried by each mesh vertex.
    pub vertex_dof: Vec<usize>,
}

impl Space {
    pub fn new(mesh: &InterfaceMesh, degree: Degree) -> Self {
        let periodic = mesh.is_periodic();
        let mut keys: HashMap<(i64, i64), usize> = HashMap::new();
        let mut dof_points = Vec::new();
        let mut on_outer = Vec::new();
        let mut on_interface = Vec::new();
        let mut vertex_dof = Vec::with_capacity(mesh.vertices.len());
        let mut new_dof = |p: Vec2, outer: bool, iface: bool, pts: &mut Vec<Vec2>, oo: &mut Vec<bool>, oi: &mut Vec<bool>| {
            if periodic {
                if let Some(&d) = keys.get(&mesh.periodic_key(p)) {
                    return d;
                }
                keys.insert(mesh.periodic_key(p), pts.len());
            }
            pts.push(p);
            oo.push(outer && !periodic);
            oi.push(iface);
            pts.len() - 1
        };
        for (v, &p) in mesh.vertices.iter().enumerate() {
            let d = new_dof(
                p,
                mesh.on_outer[v],
                mesh.interface_param[v].is_some(),
                &mut dof_points,
                &mut on_outer,
                &mut on_interface,
            );
            vertex_dof.push(d);
        }
        let mut cell_dofs = Vec::with_capacity(mesh.triangles.len());
        let mut edge_dof: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let iface_edges: std::collections::BTreeSet<(usize, usize)> = mesh
            .interface
            .iter()
            .map(|e| (e.vertices[0].min(e.vertices[1]), e.vertices[0].max(e.vertices[1])))
            .collect();
        for t in &mesh.triangles {
            let mut dofs = [usize::MAX; 6];
            for i in 0..3 {
                dofs[i] = vertex_dof[t[i]];
            }
            if degree == Degree::P2 {
                for i in 0..3 {
                    let (a, b) = (t[i], t[(i + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    let d = match edge_dof.get(&key) {
                        Some(&d) => d,
                        None => {
                            let pa = mesh.vertices[a];
                            let pb = mesh.vertices[b];
                            let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                            let d = new_dof(
                                mid,
                                mesh.on_outer[a] && mesh.on_outer[b],
                                iface_edges.contains(&key),
                                &mut dof_points,
                                &mut on_outer,
                                &mut on_interface,
                            );
                            edge_dof.insert(key, d);
                            d
                        }
                    };
                    dofs[3 + i] = d;
                }
            }
            cell_dofs.push(dofs);
        }
        Self {
            degree,
            ndof: dof_points.len(),
            cell_dofs,
            dof_points,
            on_outer,
            on_interface,
            vertex_dof,
        }
    }

    pub fn local_count(&self) -> usize {
        self.degree.local_count()
    }

    pub fn local_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell][..self.local_count()]
    }
}

pub fn element(mesh: &InterfaceMesh, cell: usize) -> Element {
    Element::new(mesh.triangles[cell].map(|v| mesh.vertices[v]))
}

/// Uniform-bucket search for the triangle containing a point.
pub struct Locator {
    origin: Vec2,
    size: f64,
    dims: (usize, usize),
    cells: Vec<Vec<usize>>,
}

impl Locator {
    pub fn new(mesh: &InterfaceMesh) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &mesh.vertices {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        let size = mesh.h.max((hi[0] - lo[0]).max(hi[1] - lo[1]) / 512.0);
        let dims = (
            ((hi[0] - lo[0]) / size).ceil() as usize + 1,
            ((hi[1] - lo[1]) / size).ceil() as usize + 1,
        );
        let mut cells = vec![Vec::new(); dims.0 * dims.1];
        for (k, t) in mesh.triangles.iter().enumerate() {
            let pts = t.map(|v| mesh.vertices[v]);
            let bx0 = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let bx1 = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let by0 = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let by1 = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            let i0 = ((bx0 - lo[0]) / size).floor() as usize;
            let i1 = (((bx1 - lo[0]) / size).floor() as usize).min(dims.0 - 1);
            let j0 = ((by0 - lo[1]) / size).floor() as usize;
            let j1 = (((by1 - lo[1]) / size).floor() as usize).min(dims.1 - 1);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    cells[i * dims.1 + j].push(k);
                }
            }
        }
        Self {
            origin: lo,
            size,
            dims,
            cells,
        }
    }

    /// Containing triangle and barycentric coordinates, if the point is in the mesh.
    pub fn locate(&self, mesh: &InterfaceMesh, p: Vec2) -> Option<(usize, [f64; 3])> {
        let fi = (p[0] - self.origin[0]) / self.size;
        let fj = (p[1] - self.origin[1]) / self.size;
        if fi < 0.0 || fj < 0.0 {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        if i >= self.dims.0 || j >= self.dims.1 {
            return None;
        }
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &k in &self.cells[i * self.dims.1 + j] {
            let e = element(mesh, k);
            let l = e.barycentric(p);
            let worst = l.iter().cloned().fold(f64::INFINITY, f64::min);
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((k, l, worst));
            }
        }
        best.filter(|b| b.2 > -1e-10).map(|b| (b.0, b.1))
    }
}

/// Sum of phase-restricted triangle areas; used in tests of the quadrature.
pub fn total_area(mesh: &InterfaceMesh) -> f64 {
    mesh.triangles.iter().map(|t| signed_area(&mesh.vertices, *t)).sum()
}
