//! Fitted triangulations of a plane region split by a closed contour.
//!
//! The interface polygon has its vertices on the spectral contour, roughly
//! equispaced in arc length. Interior seeds come from a triangular lattice near
//! the patch and from rings whose spacing grows linearly with the radius
//! outside it; a constrained Delaunay refinement then enforces the angle bound.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use crate::contour2d::{chord_arc, Contour, Vec2};
use crate::error::{Error, Result};

/// Angle bound requested from the refinement. Projecting split interface
/// edges back onto the curve costs a few degrees, so this sits above 20.
const REFINE_ANGLE_DEG: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    pub fn index(self) -> usize {
        match self {
            Phase::Plus => 0,
            Phase::Minus => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Plus => "plus",
            Phase::Minus => "minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OuterBoundary {
    /// Circle of this radius about the origin, Dirichlet data.
    Ball { radius: f64 },
    /// Square `[-L, L]^2` with opposite sides identified.
    PeriodicBox { half_width: f64 },
}

impl OuterBoundary {
    /// `8 max|z|`.
    pub fn default_ball(contour: &Contour) -> Self {
        OuterBoundary::Ball {
            radius: 8.0 * contour.max_radius(),
        }
    }
}

/// A mesh edge on the interface, with the triangles on either side.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceEdge {
    pub vertices: [usize; 2],
    /// Contour parameters of the two endpoints; the second is unwrapped to lie
    /// just after the first.
    pub params: [f64; 2],
    pub plus: usize,
    pub minus: usize,
}

#[derive(Debug, Clone)]
pub struct InterfaceMesh {
    pub vertices: Vec<Vec2>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub phases: Vec<Phase>,
    pub interface: Vec<InterfaceEdge>,
    pub outer: OuterBoundary,
    /// Vertex lies on the outer circle or box side.
    pub on_outer: Vec<bool>,
    /// Contour parameter of every interface vertex.
    pub interface_param: Vec<Option<f64>>,
    /// Counterclockwise copy of the source contour.
    pub contour: Contour,
    pub h: f64,
}

/// Smallest radius of curvature and the chord-arc based width of the curve.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSize {
    pub curvature_radius: f64,
    pub chord_arc: f64,
    pub self_intersecting: bool,
}

impl FeatureSize {
    pub fn of(contour: &Contour) -> Self {
        let ca = chord_arc(contour);
        let m = contour.monitor_grid();
        let mut radius = f64::INFINITY;
        for j in 0..m {
            let t = 2.0 * PI * j as f64 / m as f64;
            let (_, d1) = contour.eval(t);
            let d2 = contour.second_derivative(t);
            let speed = d1[0].hypot(d1[1]);
            let cross = (d1[0] * d2[1] - d1[1] * d2[0]).abs();
            if cross > 0.0 {
                radius = radius.min(speed.powi(3) / cross);
            }
        }
        Self {
            curvature_radius: radius,
            chord_arc: ca.value,
            self_intersecting: ca.self_intersecting,
        }
    }

    /// `min(curvature radius, chord_arc * pi / 2)`; the second term is the
    /// half-width of the narrowest neck for a circle-like curve.
    pub fn value(&self) -> f64 {
        self.curvature_radius.min(self.chord_arc * PI / 2.0)
    }
}

fn dist(a: Vec2, b: Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Parameters `theta_k` placing `count` points equispaced in arc length.
fn arc_length_params(contour: &Contour, count: usize) -> (Vec<f64>, f64) {
    let m = (32 * count).max(contour.monitor_grid());
    let s = contour.sample(m).expect("dense grid exceeds 2N+1");
    let speed: Vec<f64> = s.tangents.iter().map(|t| t[0].hypot(t[1])).collect();
    let dt = 2.0 * PI / m as f64;
    let mut cum = vec![0.0; m + 1];
    for j in 0..m {
        cum[j + 1] = cum[j] + 0.5 * dt * (speed[j] + speed[(j + 1) % m]);
    }
    let total = cum[m];
    let mut params = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let target = total * k as f64 / count as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        params.push((j as f64 + frac) * dt);
    }
    (params, total)
}

fn triangular_lattice(h: f64, lo: Vec2, hi: Vec2, mut keep: impl FnMut(Vec2) -> bool) -> Vec<Vec2> {
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = ((hi[1] - lo[1]) / dy).ceil() as i64;
    let cols = ((hi[0] - lo[0]) / h).ceil() as i64;
    let mut out = Vec::new();
    for i in 0..=rows {
        let y = lo[1] + i as f64 * dy;
        let shift = if i % 2 == 0 { 0.0 } else { 0.5 * h };
        for j in -1..=cols {
            let p = [lo[0] + j as f64 * h + shift, y];
            if p[0] >= lo[0] && p[0] <= hi[0] && p[1] <= hi[1] && keep(p) {
                out.push(p);
            }
        }
    }
    out
}

/// Vertices near a point, by uniform buckets.
struct Buckets {
    size: f64,
    cells: HashMap<(i64, i64), Vec<Vec2>>,
}

impl Buckets {
    fn new(size: f64, pts: &[Vec2]) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<Vec2>> = HashMap::new();
        for &p in pts {
            cells.entry(Self::key(size, p)).or_default().push(p);
        }
        Self { size, cells }
    }

    fn key(size: f64, p: Vec2) -> (i64, i64) {
        ((p[0] / size).floor() as i64, (p[1] / size).floor() as i64)
    }

    fn nearest_within(&self, p: Vec2, r: f64) -> bool {
        let (i, j) = Self::key(self.size, p);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(v) = self.cells.get(&(i + di, j + dj)) {
                    if v.iter().any(|&q| dist(p, q) < r) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

struct Input {
    points: Vec<Vec2>,
    edges: Vec<[usize; 2]>,
}

fn polygon_edges(start: usize, count: usize) -> impl Iterator<Item = [usize; 2]> {
    (0..count).map(move |k| [start + k, start + (k + 1) % count])
}

fn triangulate(input: Input) -> Result<(Vec<Vec2>, Vec<[usize; 3]>, Vec<[usize; 2]>)> {
    let pts: Vec<Point2<f64>> = input.points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(pts, input.edges)
        .map_err(|e| Error::Mesh(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != input.points.len() {
        return Err(Error::Mesh("duplicate input vertices".into()));
    }
    let result = cdt.refine(
        RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
            .with_max_additional_vertices(20 * input.points.len()),
    );
    if !result.refinement_complete {
        return Err(Error::Mesh("angle refinement did not complete".into()));
    }
    let vertices: Vec<Vec2> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let mut triangles = Vec::with_capacity(cdt.num_inner_faces());
    for f in cdt.inner_faces() {
        let v = f.vertices();
        let mut t = [v[0].fix().index(), v[1].fix().index(), v[2].fix().index()];
        if signed_area(&vertices, t) < 0.0 {
            t.swap(1, 2);
        }
        triangles.push(t);
    }
    let mut constraints = Vec::new();
    for e in cdt.undirected_edges() {
        if cdt.is_constraint_edge(e.fix()) {
            let v = e.vertices();
            constraints.push([v[0].fix().index(), v[1].fix().index()]);
        }
    }
    Ok((vertices, triangles, constraints))
}

pub(crate) fn signed_area(v: &[Vec2], t: [usize; 3]) -> f64 {
    let [a, b, c] = t.map(|i| v[i]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

/// Crossing-number test against a closed polygon.
fn inside_polygon(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    inside
}

/// Fitted mesh of the region bounded by `outer`, conforming to `contour`,
/// with target edge length `h` near the interface.
pub fn mesh_from_contour(contour: &Contour, h: f64, outer: OuterBoundary) -> Result<InterfaceMesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("mesh size must be positive, got {h}")));
    }
    let contour = contour.canonical();
    let feature = FeatureSize::of(&contour);
    if feature.self_intersecting || feature.chord_arc < 1e-8 {
        return Err(Error::Degenerate {
            chord_arc: feature.chord_arc,
        });
    }
    if h >= feature.value() {
        return Err(Error::Mesh(format!(
            "h = {h} is not below the feature size {:.4e} (curvature radius {:.4e}, chord-arc {:.4e})",
            feature.value(),
            feature.curvature_radius,
            feature.chord_arc
        )));
    }
    let reach = contour.max_radius();
    let perimeter = arc_length_params(&contour, 8).1;
    let n_if = ((perimeter / h).ceil() as usize).max(8);
    let (params, _) = arc_length_params(&contour, n_if);
    let iface: Vec<Vec2> = params.iter().map(|&t| contour.point(t)).collect();
    let near = Buckets::new(h, &iface);

    let mut stages = 0;
    let mut boundary_extra: Vec<Vec2> = Vec::new();
    loop {
        stages += 1;
        let mut points = iface.clone();
        let mut edges: Vec<[usize; 2]> = polygon_edges(0, n_if).collect();
        match outer {
            OuterBoundary::Ball { radius } => {
                let rho0 = reach + 2.0 * h;
                if radius < rho0 + h {
                    return Err(Error::Mesh(format!(
                        "outer radius {radius} leaves no room around the contour (needs > {:.4})",
                        rho0 + h
                    )));
                }
                let spokes = ((2.0 * PI * rho0 / h).ceil() as usize).max(12);
                let start = points.len();
                for k in 0..spokes {
                    let a = 2.0 * PI * k as f64 / spokes as f64;
                    points.push([radius * a.cos(), radius * a.sin()]);
                }
                edges.extend(polygon_edges(start, spokes));
                let lattice = triangular_lattice(h, [-rho0, -rho0], [rho0, rho0], |p| {
                    p[0].hypot(p[1]) < rho0 - 0.5 * h && !near.nearest_within(p, 0.7 * h)
                });
                points.extend(lattice);
                let mut rho = rho0;
                let mut ring = 0usize;
                while rho < radius - 0.5 * h * radius / rho0 {
                    let shift = if ring % 2 == 0 { 0.0 } else { 0.5 };
                    for k in 0..spokes {
                        let a = 2.0 * PI * (k as f64 + shift) / spokes as f64;
                        points.push([rho * a.cos(), rho * a.sin()]);
                    }
                    rho *= 1.0 + h / rho0;
                    ring += 1;
                }
            }
            OuterBoundary::PeriodicBox { half_width: l } => {
                if reach + 2.0 * h > l {
                    return Err(Error::Mesh(format!(
                        "box half-width {l} leaves no room around the contour (needs > {:.4})",
                        reach + 2.0 * h
                    )));
                }
                let side = ((2.0 * l / h).ceil() as usize).max(4);
                let mut coords: Vec<f64> = (0..=side).map(|k| -l + 2.0 * l * k as f64 / side as f64).collect();
                coords.extend(boundary_extra.iter().map(|p| p[0]));
                coords.sort_by(|a, b| a.total_cmp(b));
                coords.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * l);
                // counterclockwise walk around the square, same stations on every side
                let start = points.len();
                let inner = &coords[..coords.len() - 1];
                for &x in inner {
                    points.push([x, -l]);
                }
                for &y in inner {
                    points.push([l, y]);
                }
                for &x in inner {
                    points.push([-x, l]);
                }
                for &y in inner {
                    points.push([-l, -y]);
                }
                let count = points.len() - start;
                edges.extend(polygon_edges(start, count));
                let lattice = triangular_lattice(h, [-l, -l], [l, l], |p| {
                    p[0].abs() < l - 0.7 * h && p[1].abs() < l - 0.7 * h && !near.nearest_within(p, 0.7 * h)
                });
                points.extend(lattice);
            }
        }
        let (mut vertices, triangles, constraints) = triangulate(Input { points, edges })?;

        if let OuterBoundary::PeriodicBox { half_width: l } = outer {
            // stations must match on opposite sides; add any split points and redo
            let tol = 1e-12 * l;
            let mut stations: Vec<f64> = Vec::new();
            for p in &vertices {
                if (p[0].abs() - l).abs() < tol {
                    stations.push(p[1]);
                }
                if (p[1].abs() - l).abs() < tol {
                    stations.push(p[0]);
                }
            }
            let mut fresh = Vec::new();
            for s in stations {
                for c in [s, -s] {
                    let known = vertices.iter().any(|q| (q[0] - c).abs() < tol && (q[1] + l).abs() < tol)
                        && vertices.iter().any(|q| (q[0] - l).abs() < tol && (q[1] - c).abs() < tol);
                    if !known && !fresh.iter().any(|&f: &f64| (f - c).abs() < tol) {
                        fresh.push(c);
                    }
                }
            }
            if !fresh.is_empty() {
                if stages >= 8 {
                    return Err(Error::Mesh("periodic boundary stations did not settle".into()));
                }
                boundary_extra.extend(fresh.into_iter().map(|c| [c, 0.0]));
                continue;
            }
        }

        return finish(contour, h, outer, &mut vertices, triangles, constraints, n_if, &params);
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    contour: Contour,
    h: f64,
    outer: OuterBoundary,
    vertices: &mut [Vec2],
    triangles: Vec<[usize; 3]>,
    constraints: Vec<[usize; 2]>,
    n_if: usize,
    params: &[f64],
) -> Result<InterfaceMesh> {
    let nv = vertices.len();
    // only applied to constraint edges, which are either interface or outer
    let on_boundary = |p: Vec2| match outer {
        OuterBoundary::Ball { radius } => p[0].hypot(p[1]) > 0.5 * (radius + contour.max_radius()),
        OuterBoundary::PeriodicBox { half_width: l } => {
            (p[0].abs() - l).abs() < 1e-12 * l || (p[1].abs() - l).abs() < 1e-12 * l
        }
    };
    let mut on_outer = vec![false; nv];
    let mut interface_param: Vec<Option<f64>> = vec![None; nv];
    for (k, &t) in params.iter().enumerate().take(n_if) {
        interface_param[k] = Some(t);
    }
    let mut iface_edges = Vec::new();
    for [a, b] in constraints {
        if on_boundary(vertices[a]) && on_boundary(vertices[b]) {
            on_outer[a] = true;
            on_outer[b] = true;
        } else {
            iface_edges.push([a, b]);
        }
    }
    // split points are moved onto the curve
    for &[a, b] in &iface_edges {
        for v in [a, b] {
            if interface_param[v].is_none() {
                let t = contour.closest_parameter(vertices[v]);
                vertices[v] = contour.point(t);
                interface_param[v] = Some(t);
            }
        }
    }
    let mut order: Vec<(f64, usize)> = interface_param
        .iter()
        .enumerate()
        .filter_map(|(v, t)| t.map(|t| (t, v)))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let polygon: Vec<Vec2> = order.iter().map(|&(_, v)| vertices[v]).collect();

    let phases: Vec<Phase> = triangles
        .iter()
        .map(|t| {
            let c = [
                (vertices[t[0]][0] + vertices[t[1]][0] + vertices[t[2]][0]) / 3.0,
                (vertices[t[0]][1] + vertices[t[1]][1] + vertices[t[2]][1]) / 3.0,
            ];
            if inside_polygon(&polygon, c) {
                Phase::Plus
            } else {
                Phase::Minus
            }
        })
        .collect();
    for (k, t) in triangles.iter().enumerate() {
        if signed_area(vertices, *t) <= 0.0 {
            return Err(Error::Mesh(format!(
                "triangle {k} inverted after moving interface vertices onto the curve; reduce h"
            )));
        }
    }

    let mut owners: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, t) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            owners.entry((a.min(b), a.max(b))).or_default().push(k);
        }
    }
    let mut interface = Vec::with_capacity(iface_edges.len());
    for [a, b] in iface_edges {
        let tris = owners.get(&(a.min(b), a.max(b))).cloned().unwrap_or_default();
        if tris.len() != 2 || phases[tris[0]] == phases[tris[1]] {
            return Err(Error::Mesh(format!(
                "interface edge ({a}, {b}) does not separate the phases"
            )));
        }
        let (plus, minus) = if phases[tris[0]] == Phase::Plus {
            (tris[0], tris[1])
        } else {
            (tris[1], tris[0])
        };
        let (ta, tb) = (interface_param[a].unwrap(), interface_param[b].unwrap());
        // orient along increasing parameter so the plus side is on the left
        let (va, vb, pa, mut pb) = if (tb - ta).rem_euclid(2.0 * PI) < PI {
            (a, b, ta, tb)
        } else {
            (b, a, tb, ta)
        };
        while pb < pa {
            pb += 2.0 * PI;
        }
        interface.push(InterfaceEdge {
            vertices: [va, vb],
            params: [pa, pb],
            plus,
            minus,
        });
    }
    interface.sort_by(|x, y| x.params[0].total_cmp(&y.params[0]));
    Ok(InterfaceMesh {
        vertices: vertices.to_vec(),
        triangles,
        phases,
        interface,
        outer,
        on_outer,
        interface_param,
        contour,
        h,
    })
}

impl InterfaceMesh {
    pub fn area(&self, phase: Phase) -> f64 {
        self.triangles
            .iter()
            .zip(&self.phases)
            .filter(|(_, &p)| p == phase)
            .map(|(t, _)| signed_area(&self.vertices, *t))
            .sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut worst = 180.0f64;
        for t in &self.triangles {
            for i in 0..3 {
                let o = self.vertices[t[i]];
                let a = self.vertices[t[(i + 1) % 3]];
                let b = self.vertices[t[(i + 2) % 3]];
                let u = [a[0] - o[0], a[1] - o[1]];
                let v = [b[0] - o[0], b[1] - o[1]];
                let ang = (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]).abs();
                worst = worst.min(ang.to_degrees());
            }
        }
        worst
    }

    /// Longest edge among triangles touching the interface.
    pub fn interface_edge_max(&self) -> f64 {
        self.interface
            .iter()
            .map(|e| dist(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]))
            .fold(0.0, f64::max)
    }

    /// Point on the curve and outward unit normal at fraction `s` of an interface edge.
    pub fn interface_frame(&self, edge: &InterfaceEdge, s: f64) -> (Vec2, Vec2) {
        let t = edge.params[0] + s * (edge.params[1] - edge.params[0]);
        let (z, dz) = self.contour.eval(t);
        let len = dz[0].hypot(dz[1]);
        (z, [dz[1] / len, -dz[0] / len])
    }

    /// Phase on the true side of the curve for a point of `cell`. Cells away
    /// from the interface keep their tag; cells touching it may overlap the
    /// thin segment between a chord and the curve.
    pub fn phase_at(&self, cell: usize, x: Vec2) -> Phase {
        let tag = self.phases[cell];
        if self.triangles[cell].iter().all(|&v| self.interface_param[v].is_none()) {
            return tag;
        }
        let t = self.contour.closest_parameter(x);
        let (z, dz) = self.contour.eval(t);
        let side = (x[0] - z[0]) * dz[1] - (x[1] - z[1]) * dz[0];
        let scale = dz[0].hypot(dz[1]) * self.h;
        if side.abs() <= 1e-12 * scale {
            tag
        } else if side < 0.0 {
            Phase::Plus
        } else {
            Phase::Minus
        }
    }

    pub fn edge_length(&self, edge: &InterfaceEdge) -> f64 {
        dist(self.vertices[edge.vertices[0]], self.vertices[edge.vertices[1]])
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.outer, OuterBoundary::PeriodicBox { .. })
    }

    /// Vertex coordinates folded onto the left and bottom sides of the box.
    pub(crate) fn periodic_key(&self, p: Vec2) -> (i64, i64) {
        let OuterBoundary::PeriodicBox { half_width: l } = self.outer else {
            return ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
        };
        let wrap = |x: f64| if (x - l).abs() < 1e-12 * l { -l } else { x };
        (
            (wrap(p[0]) / l * 1e9).round() as i64,
            (wrap(p[1]) / l * 1e9).round() as i64,
        )
    }

    pub fn interface_vertex_count(&self) -> usize {
        self.interface_param.iter().filter(|t| t.is_some()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_nodes_on_curve() {
        let c = Contour::circle(1.0, 4);
        let m = mesh_from_contour(&c, 0.1, OuterBoundary::Ball { radius: 4.0 }).unwrap();
        for (v, t) in m.interface_param.iter().enumerate() {
            if t.is_some() {
                let p = m.vertices[v];
                assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
            }
        }
        assert!(m.min_angle_deg() >= 20.0, "{}", m.min_angle_deg());
        for e in &m.interface {
            assert_eq!(m.phases[e.plus], Phase::Plus);
            assert_eq!(m.phases[e.minus], Phase::Minus);
        }
        let outer: f64 = m.on_outer.iter().filter(|&&b| b).count() as f64;
        assert!(outer >= 12.0);
    }

    #[test]
    fn ellipse_phase_areas() {
        let c = Contour::ellipse(2.0, 1.0, 8);
        let mut errs = Vec::new();
        for h in [0.2, 0.1] {
            let m = mesh_from_contour(&c, h, OuterBoundary::Ball { radius: 6.0 }).unwrap();
            errs.push((m.area(Phase::Plus) - c.area()).abs());
            assert!(m.min_angle_deg() >= 20.0);
        }
        assert!(errs[0] < 0.05 && errs[1] < errs[0] / 3.0, "{errs:?}");
    }

    #[test]
    fn coarse_h_rejected() {
        let c = Contour::ellipse(2.0, 1.0, 8);
        let r = mesh_from_contour(&c, 0.6, OuterBoundary::Ball { radius: 16.0 });
        assert!(matches!(r, Err(Error::Mesh(_))));
    }

    #[test]
    fn periodic_box_sides_match() {
        let c = Contour::circle(1.0, 4);
        let m = mesh_from_contour(&c, 0.2, OuterBoundary::PeriodicBox { half_width: 2.0 }).unwrap();
        let mut left: Vec<i64> = Vec::new();
        let mut right: Vec<i64> = Vec::new();
        for p in &m.vertices {
            if (p[0] + 2.0).abs() < 1e-12 {
                left.push((p[1] * 1e9).round() as i64);
            }
            if (p[0] - 2.0).abs() < 1e-12 {
                right.push((p[1] * 1e9).round() as i64);
            }
        }
        left.sort();
        right.sort();
        assert_eq!(left, right);
        let total = m.area(Phase::Plus) + m.area(Phase::Minus);
        assert!((total - 16.0).abs() < 1e-12);
    }
}
