//! Two-phase problems `-d_j(a^{jk} d_k u) = f` in each phase with
//! `[u] = 0` and `[a^{jk} d_k u N_j] = g` on the interface, in weak form
//! `int a grad u . grad phi = int f phi + int_G g phi`.

use std::sync::Arc;

use rayon::prelude::*;

use super::mesh::{InterfaceMesh, OuterBoundary, Phase};
use super::space::{element, Degree, Element, Locator, Space};
use crate::contour2d::{Mat2, Vec2};
use crate::error::{Error, Result};
use crate::linalg::{pcg, CgOptions, CgReport, CsrMatrix, IncompleteCholesky, Jacobi, Preconditioner};
use crate::quadrature::{edge_rule, TRIANGLE_DEGREE4};

pub type ScalarField = Arc<dyn Fn(Vec2, Phase) -> f64 + Send + Sync>;
/// Interface datum as a function of the point on the curve and the outward normal.
pub type InterfaceDatum = Arc<dyn Fn(Vec2, Vec2) -> f64 + Send + Sync>;
pub type BoundaryField = Arc<dyn Fn(Vec2) -> f64 + Send + Sync>;
pub type TensorField = Arc<dyn Fn(Vec2, Phase) -> Mat2 + Send + Sync>;

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Clone, Default)]
pub enum Coefficient {
    #[default]
    Identity,
    /// Constant tensor per phase, indexed by [`Phase::index`].
    PerPhase([Mat2; 2]),
    Field(TensorField),
}

impl Coefficient {
    pub fn at(&self, x: Vec2, phase: Phase) -> Mat2 {
        match self {
            Coefficient::Identity => IDENTITY,
            Coefficient::PerPhase(a) => a[phase.index()],
            Coefficient::Field(f) => f(x, phase),
        }
    }
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Identity => write!(f, "Identity"),
            Coefficient::PerPhase(a) => write!(f, "PerPhase({a:?})"),
            Coefficient::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// Smallest eigenvalue of the symmetric part of a 2x2 tensor.
pub fn min_eigenvalue(a: &Mat2) -> f64 {
    let p = 0.5 * (a[0][0] + a[1][1]);
    let off = 0.5 * (a[0][1] + a[1][0]);
    let q = (0.25 * (a[0][0] - a[1][1]).powi(2) + off * off).sqrt();
    p - q
}

pub fn apply(a: &Mat2, v: Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// Data of one scalar component.
#[derive(Clone)]
pub struct Component {
    pub forcing: ScalarField,
    pub jump: InterfaceDatum,
    /// Dirichlet data on the outer circle; ignored on a periodic box.
    pub boundary: BoundaryField,
}

impl Default for Component {
    fn default() -> Self {
        Self {
            forcing: Arc::new(|_, _| 0.0),
            jump: Arc::new(|_, _| 0.0),
            boundary: Arc::new(|_| 0.0),
        }
    }
}

/// A scalar (one component) or vector problem sharing one coefficient tensor.
#[derive(Clone, Default)]
pub struct TwoPhaseProblem {
    pub coefficient: Coefficient,
    pub components: Vec<Component>,
}

impl TwoPhaseProblem {
    pub fn scalar(component: Component) -> Self {
        Self {
            coefficient: Coefficient::Identity,
            components: vec![component],
        }
    }

    pub fn with_coefficient(mut self, coefficient: Coefficient) -> Self {
        self.coefficient = coefficient;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub degree: Degree,
    pub cg: CgOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            degree: Degree::P1,
            cg: CgOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    /// One conjugate-gradient report per component.
    pub cg: Vec<CgReport>,
    /// Smallest eigenvalue of the coefficient over all quadrature points.
    pub positivity: f64,
    pub preconditioner: &'static str,
    pub free_dofs: usize,
}

#[derive(Clone)]
pub struct TwoPhaseSolution {
    pub space: Space,
    /// `values[c][dof]`
    pub values: Vec<Vec<f64>>,
    pub coefficient: Coefficient,
    pub report: SolverReport,
}

struct LocalSystem {
    dofs: Vec<usize>,
    matrix: Vec<f64>,
    loads: Vec<Vec<f64>>,
    positivity: f64,
    asymmetry: f64,
}

fn local_system(mesh: &InterfaceMesh, space: &Space, problem: &TwoPhaseProblem, cell: usize) -> LocalSystem {
    let e = element(mesh, cell);
    let n = space.local_count();
    let mut matrix = vec![0.0; n * n];
    let mut loads = vec![vec![0.0; n]; problem.components.len()];
    let mut positivity = f64::INFINITY;
    let mut asymmetry = 0.0f64;
    let rule = TRIANGLE_DEGREE4;
    for (l, w) in rule.points.iter().zip(rule.weights) {
        let x = e.point(*l);
        let (v, g) = e.shape(space.degree, *l);
        let phase = mesh.phase_at(cell, x);
        let a = problem.coefficient.at(x, phase);
        positivity = positivity.min(min_eigenvalue(&a));
        asymmetry = asymmetry.max((a[0][1] - a[1][0]).abs());
        let wa = w * e.area;
        for j in 0..n {
            let ag = apply(&a, g[j]);
            for i in 0..n {
                matrix[i * n + j] += wa * (g[i][0] * ag[0] + g[i][1] * ag[1]);
            }
        }
        for (c, comp) in problem.components.iter().enumerate() {
            let f = (comp.forcing)(x, phase);
            for i in 0..n {
                loads[c][i] += wa * f * v[i];
            }
        }
    }
    LocalSystem {
        dofs: space.local_dofs(cell).to_vec(),
        matrix,
        loads,
        positivity,
        asymmetry,
    }
}

/// Local coordinates of an interface edge inside its plus triangle: the
/// barycentric coordinates at edge fraction `s`.
pub(crate) fn edge_barycentric(mesh: &InterfaceMesh, cell: usize, ends: [usize; 2], s: f64) -> [f64; 3] {
    let t = mesh.triangles[cell];
    let mut l = [0.0; 3];
    for i in 0..3 {
        if t[i] == ends[0] {
            l[i] = 1.0 - s;
        } else if t[i] == ends[1] {
            l[i] = s;
        }
    }
    l
}

/// Assemble and solve. Dirichlet dofs are eliminated; on a periodic box the
/// constant null space is projected out and the solution normalized to zero mean.
pub fn solve_weak(problem: &TwoPhaseProblem, mesh: &InterfaceMesh, opts: SolveOptions) -> Result<TwoPhaseSolution> {
    if problem.components.is_empty() {
        return Err(Error::InvalidInput("problem has no components".into()));
    }
    let space = Space::new(mesh, opts.degree);
    let periodic = mesh.is_periodic();
    let locals: Vec<LocalSystem> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|k| local_system(mesh, &space, problem, k))
        .collect();
    let positivity = locals.iter().map(|l| l.positivity).fold(f64::INFINITY, f64::min);
    if !(positivity > 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "coefficient eigenvalue {positivity:e} at a quadrature point"
        )));
    }
    let asymmetry = locals.iter().map(|l| l.asymmetry).fold(0.0, f64::max);
    if asymmetry > 1e-12 * (1.0 + positivity) {
        return Err(Error::InvalidInput(format!("coefficient is not symmetric (|a12 - a21| = {asymmetry:e})")));
    }

    let nc = problem.components.len();
    let mut rhs = vec![vec![0.0; space.ndof]; nc];
    for l in &locals {
        for (c, load) in l.loads.iter().enumerate() {
            for (i, &d) in l.dofs.iter().enumerate() {
                rhs[c][d] += load[i];
            }
        }
    }
    let (gs, gw) = edge_rule();
    for edge in &mesh.interface {
        let len = mesh.edge_length(edge);
        let e = element(mesh, edge.plus);
        let dofs = space.local_dofs(edge.plus);
        for (s, w) in gs.iter().zip(gw) {
            let (x, normal) = mesh.interface_frame(edge, *s);
            let (v, _) = e.shape(space.degree, edge_barycentric(mesh, edge.plus, edge.vertices, *s));
            for (c, comp) in problem.components.iter().enumerate() {
                let g = (comp.jump)(x, normal);
                for (i, &d) in dofs.iter().enumerate() {
                    rhs[c][d] += w * len * g * v[i];
                }
            }
        }
    }

    // Dirichlet values and free numbering
    let mut fixed = vec![vec![0.0; space.ndof]; nc];
    let mut free_index = vec![usize::MAX; space.ndof];
    let mut free = 0;
    for d in 0..space.ndof {
        if space.on_outer[d] {
            for (c, comp) in problem.components.iter().enumerate() {
                fixed[c][d] = (comp.boundary)(space.dof_points[d]);
            }
        } else {
            free_index[d] = free;
            free += 1;
        }
    }
    if free == 0 {
        return Err(Error::Mesh("no free degrees of freedom".into()));
    }
    let mut triplets = Vec::with_capacity(locals.iter().map(|l| l.matrix.len()).sum());
    let mut b = vec![vec![0.0; free]; nc];
    for (c, r) in rhs.iter().enumerate() {
        for d in 0..space.ndof {
            if free_index[d] != usize::MAX {
                b[c][free_index[d]] += r[d];
            }
        }
    }
    for l in &locals {
        let n = l.dofs.len();
        for (i, &di) in l.dofs.iter().enumerate() {
            let fi = free_index[di];
            if fi == usize::MAX {
                continue;
            }
            for (j, &dj) in l.dofs.iter().enumerate() {
                let k = l.matrix[i * n + j];
                let fj = free_index[dj];
                if fj == usize::MAX {
                    for c in 0..nc {
                        b[c][fi] -= k * fixed[c][dj];
                    }
                } else {
                    triplets.push((fi, fj, k));
                }
            }
        }
    }
    let a = CsrMatrix::from_triplets(free, &triplets);

    if periodic {
        for (c, bc) in b.iter().enumerate() {
            let net: f64 = bc.iter().sum();
            let scale: f64 = bc.iter().map(|v| v.abs()).sum();
            if net.abs() > 0.05 * scale && scale > 0.0 {
                return Err(Error::Precondition(format!(
                    "component {c}: forcing and jump data are incompatible on the periodic box (net {net:e} of {scale:e})"
                )));
            }
        }
    }

    let (pc, name): (Box<dyn Preconditioner + Sync>, &'static str) = match IncompleteCholesky::new(&a) {
        Some(ic) => (Box::new(ic), "incomplete-cholesky"),
        None => (Box::new(Jacobi::new(&a)), "jacobi"),
    };
    let cg_opts = CgOptions {
        project_mean: periodic,
        ..opts.cg
    };
    let solved: Vec<Result<(Vec<f64>, CgReport)>> = b
        .par_iter()
        .map(|bc| {
            let mut x = vec![0.0; free];
            let rep = pcg(&a, pc.as_ref(), bc, &mut x, cg_opts)?;
            Ok((x, rep))
        })
        .collect();
    let mut values = Vec::with_capacity(nc);
    let mut reports = Vec::with_capacity(nc);
    for (c, res) in solved.into_iter().enumerate() {
        let (x, rep) = res?;
        let mut u = fixed[c].clone();
        for d in 0..space.ndof {
            if free_index[d] != usize::MAX {
                u[d] = x[free_index[d]];
            }
        }
        values.push(u);
        reports.push(rep);
    }
    let mut sol = TwoPhaseSolution {
        space,
        values,
        coefficient: problem.coefficient.clone(),
        report: SolverReport {
            cg: reports,
            positivity,
            preconditioner: name,
            free_dofs: free,
        },
    };
    if periodic {
        for c in 0..nc {
            let mean = sol.integral(mesh, c) / mesh_area(mesh);
            sol.values[c].iter_mut().for_each(|v| *v -= mean);
        }
    }
    Ok(sol)
}

fn mesh_area(mesh: &InterfaceMesh) -> f64 {
    match mesh.outer {
        OuterBoundary::PeriodicBox { half_width } => 4.0 * half_width * half_width,
        OuterBoundary::Ball { .. } => super::space::total_area(mesh),
    }
}

impl TwoPhaseSolution {
    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn degree(&self) -> Degree {
        self.space.degree
    }

    /// Value inside `cell` at barycentric coordinates `l`.
    pub fn value_in(&self, mesh: &InterfaceMesh, cell: usize, l: [f64; 3], comp: usize) -> f64 {
        let e = element(mesh, cell);
        let (v, _) = e.shape(self.space.degree, l);
        self.space
            .local_dofs(cell)
            .iter()
            .enumerate()
            .map(|(i, &d)| v[i] * self.values[comp][d])
            .sum()
    }

    /// Gradient inside `cell` at barycentric coordinates `l`.
    pub fn gradient_in(&self, mesh: &InterfaceMesh, cell: usize, l: [f64; 3], comp: usize) -> Vec2 {
        let e = element(mesh, cell);
        gradient_with(&e, &self.space, cell, l, &self.values[comp])
    }

    pub fn value_at(&self, mesh: &InterfaceMesh, locator: &Locator, x: Vec2, comp: usize) -> Option<f64> {
        locator.locate(mesh, x).map(|(k, l)| self.value_in(mesh, k, l, comp))
    }

    /// Integral of component `comp` over the mesh.
    pub fn integral(&self, mesh: &InterfaceMesh, comp: usize) -> f64 {
        let rule = TRIANGLE_DEGREE4;
        (0..mesh.triangles.len())
            .map(|k| {
                let area = element(mesh, k).area;
                rule.points
                    .iter()
                    .zip(rule.weights)
                    .map(|(l, w)| w * area * self.value_in(mesh, k, *l, comp))
                    .sum::<f64>()
            })
            .sum()
    }

    /// Per-phase gradient recovered at each mesh vertex: area-weighted average
    /// of the gradients of the incident elements of that phase.
    pub fn recovered_gradients(&self, mesh: &InterfaceMesh, comp: usize) -> [Vec<Option<Vec2>>; 2] {
        let nv = mesh.vertices.len();
        let mut sum = [vec![[0.0; 2]; nv], vec![[0.0; 2]; nv]];
        let mut weight = [vec![0.0; nv], vec![0.0; nv]];
        for (k, t) in mesh.triangles.iter().enumerate() {
            let e = element(mesh, k);
            let p = mesh.phases[k].index();
            for i in 0..3 {
                let mut l = [0.0; 3];
                l[i] = 1.0;
                let g = gradient_with(&e, &self.space, k, l, &self.values[comp]);
                sum[p][t[i]][0] += e.area * g[0];
                sum[p][t[i]][1] += e.area * g[1];
                weight[p][t[i]] += e.area;
            }
        }
        let pick = |p: usize| -> Vec<Option<Vec2>> {
            (0..nv)
                .map(|v| (weight[p][v] > 0.0).then(|| [sum[p][v][0] / weight[p][v], sum[p][v][1] / weight[p][v]]))
                .collect()
        };
        [pick(0), pick(1)]
    }

    /// Recovered gradient at a point: the containing element's phase selects
    /// the vertex gradients, which are interpolated linearly.
    pub fn smooth_gradient_at(
        &self,
        mesh: &InterfaceMesh,
        locator: &Locator,
        recovered: &[Vec<Option<Vec2>>; 2],
        x: Vec2,
    ) -> Option<Vec2> {
        let (k, l) = locator.locate(mesh, x)?;
        let p = mesh.phases[k].index();
        let mut g = [0.0; 2];
        for i in 0..3 {
            let gv = recovered[p][mesh.triangles[k][i]]?;
            g[0] += l[i] * gv[0];
            g[1] += l[i] * gv[1];
        }
        Some(g)
    }
}

pub(crate) fn gradient_with(e: &Element, space: &Space, cell: usize, l: [f64; 3], values: &[f64]) -> Vec2 {
    let (_, g) = e.shape(space.degree, l);
    let mut out = [0.0; 2];
    for (i, &d) in space.local_dofs(cell).iter().enumerate() {
        out[0] += g[i][0] * values[d];
        out[1] += g[i][1] * values[d];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour2d::Contour;
    use crate::twophase::mesh::mesh_from_contour;

    #[test]
    fn zero_data_gives_zero() {
        let c = Contour::circle(1.0, 4);
        let m = mesh_from_contour(&c, 0.2, OuterBoundary::Ball { radius: 3.0 }).unwrap();
        let s = solve_weak(&TwoPhaseProblem::scalar(Component::default()), &m, SolveOptions::default()).unwrap();
        assert!(s.values[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_solution_is_reproduced() {
        // u = 1 + 2x - y is harmonic with no jump; P1 and P2 reproduce it exactly
        let c = Contour::ellipse(1.2, 0.8, 8);
        let m = mesh_from_contour(&c, 0.2, OuterBoundary::Ball { radius: 3.0 }).unwrap();
        let exact = |p: Vec2| 1.0 + 2.0 * p[0] - p[1];
        for degree in [Degree::P1, Degree::P2] {
            let comp = Component {
                boundary: Arc::new(exact),
                ..Component::default()
            };
            let s = solve_weak(&TwoPhaseProblem::scalar(comp), &m, SolveOptions { degree, ..Default::default() }).unwrap();
            for (d, p) in s.space.dof_points.iter().enumerate() {
                assert!((s.values[0][d] - exact(*p)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn indefinite_coefficient_is_rejected() {
        let c = Contour::circle(1.0, 4);
        let m = mesh_from_contour(&c, 0.3, OuterBoundary::Ball { radius: 3.0 }).unwrap();
        let p = TwoPhaseProblem::scalar(Component::default())
            .with_coefficient(Coefficient::PerPhase([IDENTITY, [[1.0, 0.0], [0.0, -1.0]]]));
        assert!(matches!(solve_weak(&p, &m, SolveOptions::default()), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn eigenvalue_of_symmetric_tensor() {
        assert!((min_eigenvalue(&[[2.0, 1.0], [1.0, 2.0]]) - 1.0).abs() < 1e-15);
    }
}
