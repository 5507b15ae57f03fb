//! Manufactured-solution convergence studies.
//!
//! All built-in cases use the unit circle as interface, with level set
//! `phi = r^2 - 1`, and a smooth background `q = sin(pi x / 2) cos(pi y / 3)`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::jump::{jump_l2_error, measure_interface_jump, JumpQuantity};
use super::mesh::{mesh_from_contour, InterfaceMesh, OuterBoundary, Phase};
use super::problem::{
    apply, solve_weak, Coefficient, Component, InterfaceDatum, SolveOptions, TwoPhaseProblem, TwoPhaseSolution,
};
use super::space::element;
use crate::contour2d::shape::linear_slope;
use crate::contour2d::{Contour, Mat2, Vec2};
use crate::error::{Error, Result};
use crate::flatten::{default_outer_radius, solve_annulus_extension, solve_disk_extension, BiharmonicMap};
use crate::quadrature::TRIANGLE_DEGREE6;

pub type ExactField = Arc<dyn Fn(Vec2, Phase) -> f64 + Send + Sync>;
pub type ExactGradient = Arc<dyn Fn(Vec2, Phase) -> Vec2 + Send + Sync>;

/// A problem with known phase-wise solution.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub contour: Contour,
    pub outer: OuterBoundary,
    pub problem: TwoPhaseProblem,
    pub exact: ExactField,
    pub gradient: ExactGradient,
    /// The flux jump `g` the discrete solution should reproduce.
    pub flux_jump: InterfaceDatum,
}

fn background(p: Vec2) -> (f64, Vec2, f64) {
    let (a, b) = (PI / 2.0, PI / 3.0);
    let (sx, cx) = (a * p[0]).sin_cos();
    let (sy, cy) = (b * p[1]).sin_cos();
    let q = sx * cy;
    (q, [a * cx * cy, -b * sx * sy], -(a * a + b * b) * q)
}

/// `u+ = q + c phi^m x`, `u- = q`, returning value, gradient and Laplacian per phase.
fn layered(m: i32, c: f64) -> impl Fn(Vec2, Phase) -> (f64, Vec2, f64) + Send + Sync + Clone {
    move |p, phase| {
        let (q, gq, lq) = background(p);
        if phase == Phase::Minus {
            return (q, gq, lq);
        }
        let (x, y) = (p[0], p[1]);
        let phi = x * x + y * y - 1.0;
        let mf = m as f64;
        let pm = phi.powi(m);
        let pm1 = if m >= 1 { mf * phi.powi(m - 1) } else { 0.0 };
        let pm2 = if m >= 2 { mf * (mf - 1.0) * phi.powi(m - 2) } else { 0.0 };
        // w = phi^m x; grad phi = 2 (x, y); Delta phi = 4
        let w = pm * x;
        let gw = [pm + pm1 * 2.0 * x * x, pm1 * 2.0 * x * y];
        // Delta(F(phi) x) = x (F'' |grad phi|^2 + 4 F') + 2 F' grad phi . e_x
        let lw = x * (pm2 * 4.0 * (x * x + y * y) + 4.0 * pm1) + 4.0 * pm1 * x;
        (q + c * w, [gq[0] + c * gw[0], gq[1] + c * gw[1]], lq + c * lw)
    }
}

fn from_layered(
    name: &str,
    outer_radius: f64,
    f: impl Fn(Vec2, Phase) -> (f64, Vec2, f64) + Send + Sync + Clone + 'static,
) -> ManufacturedCase {
    let (f1, f2, f3, f4, f5) = (f.clone(), f.clone(), f.clone(), f.clone(), f);
    let jump: InterfaceDatum = Arc::new(move |x, n| {
        let gp = f1(x, Phase::Plus).1;
        let gm = f1(x, Phase::Minus).1;
        (gp[0] - gm[0]) * n[0] + (gp[1] - gm[1]) * n[1]
    });
    let comp = Component {
        forcing: Arc::new(move |x, p| -f2(x, p).2),
        jump: jump.clone(),
        boundary: Arc::new(move |x| f3(x, Phase::Minus).0),
    };
    ManufacturedCase {
        name: name.to_string(),
        contour: Contour::circle(1.0, 4),
        outer: OuterBoundary::Ball { radius: outer_radius },
        problem: TwoPhaseProblem::scalar(comp),
        exact: Arc::new(move |x, p| f4(x, p).0),
        gradient: Arc::new(move |x, p| f5(x, p).1),
        flux_jump: jump,
    }
}

impl ManufacturedCase {
    /// `u+ = q + phi x`: gradient kink and a varying flux jump `g = 2 x` on the circle.
    pub fn kinked_circle() -> Self {
        from_layered("kinked-circle", 2.0, layered(1, 1.0))
    }

    /// `u+ = q + phi^3 x`: continuous second derivatives across the circle,
    /// so straight-sided P2 elements see no kink at the order they resolve.
    pub fn cubic_circle() -> Self {
        from_layered("cubic-circle", 2.0, layered(3, 1.0))
    }

    /// Kinked solution on a periodic box `[-2, 2]^2`. The background is
    /// `cos(pi x / 2) cos(pi y / 2)` and the layer `c (r^2 - 1)`, which keeps
    /// the data compatible: `int f + int g = 0`.
    pub fn periodic_kinked() -> Self {
        let k = PI / 2.0;
        let c = 0.5;
        let field = move |p: Vec2, phase: Phase| -> (f64, Vec2, f64) {
            let (sx, cx) = (k * p[0]).sin_cos();
            let (sy, cy) = (k * p[1]).sin_cos();
            let q = cx * cy;
            let gq = [-k * sx * cy, -k * cx * sy];
            let lq = -2.0 * k * k * q;
            match phase {
                Phase::Minus => (q, gq, lq),
                Phase::Plus => {
                    let phi = p[0] * p[0] + p[1] * p[1] - 1.0;
                    (q + c * phi, [gq[0] + 2.0 * c * p[0], gq[1] + 2.0 * c * p[1]], lq + 4.0 * c)
                }
            }
        };
        let mut case = from_layered("periodic-kinked", 2.0, field);
        case.outer = OuterBoundary::PeriodicBox { half_width: 2.0 };
        case
    }

    /// Kinked solution with the coefficient `a = J A A^T` of the composite
    /// biharmonic map (disk inside, annulus outside) of a rough contour.
    /// The map is only `C^1` across the circle, so `a` is Lipschitz with a
    /// jump in its gradient there.
    pub fn rough_coefficient(rough: &Contour) -> Result<Self> {
        let disk = Arc::new(solve_disk_extension(rough));
        let annulus = Arc::new(solve_annulus_extension(rough, default_outer_radius(rough))?);
        let outer_radius = 2.0;
        if annulus.outer_radius() < outer_radius {
            return Err(Error::Precondition("annulus map does not cover the outer ball".into()));
        }
        let coeff = move |x: Vec2| -> Mat2 { pullback_coefficient(&disk, &annulus, x) };
        let base = layered(1, 1.0);
        let a = Arc::new(coeff.clone());
        let (a1, a2) = (a.clone(), a.clone());
        let (b1, b2, b3, b4) = (base.clone(), base.clone(), base.clone(), base);
        let flux = move |x: Vec2, p: Phase| -> Vec2 { apply(&a1(x), b1(x, p).1) };
        let fd = 1e-5;
        let forcing = move |x: Vec2, p: Phase| -> f64 {
            let dx = (flux([x[0] + fd, x[1]], p)[0] - flux([x[0] - fd, x[1]], p)[0]) / (2.0 * fd);
            let dy = (flux([x[0], x[1] + fd], p)[1] - flux([x[0], x[1] - fd], p)[1]) / (2.0 * fd);
            -(dx + dy)
        };
        let jump: InterfaceDatum = Arc::new(move |x, n| {
            let d = [b2(x, Phase::Plus).1, b2(x, Phase::Minus).1];
            let g = apply(&a2(x), [d[0][0] - d[1][0], d[0][1] - d[1][1]]);
            g[0] * n[0] + g[1] * n[1]
        });
        let comp = Component {
            forcing: Arc::new(forcing),
            jump: jump.clone(),
            boundary: Arc::new(move |x| b3(x, Phase::Minus).0),
        };
        Ok(ManufacturedCase {
            name: "rough-coefficient".into(),
            contour: Contour::circle(1.0, 4),
            outer: OuterBoundary::Ball { radius: outer_radius },
            problem: TwoPhaseProblem::scalar(comp)
                .with_coefficient(Coefficient::Field(Arc::new(move |x, _| a(x)))),
            exact: Arc::new(move |x, p| b4(x, p).0),
            gradient: Arc::new(move |x, p| layered(1, 1.0)(x, p).1),
            flux_jump: jump,
        })
    }
}

/// `det(DZ) (DZ)^{-1} (DZ)^{-T}` at `x`, using the disk map for `|x| < 1`
/// and the annulus map outside.
pub fn pullback_coefficient(disk: &BiharmonicMap, annulus: &BiharmonicMap, x: Vec2) -> Mat2 {
    let r = x[0].hypot(x[1]);
    let t = x[1].atan2(x[0]);
    let m = if r < 1.0 { disk } else { annulus };
    let j = m.jacobian(r, t).expect("point inside the map domain");
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let mut a = [[0.0; 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            a[p][q] = det * (inv[p][0] * inv[q][0] + inv[p][1] * inv[q][1]);
        }
    }
    a
}

/// Errors of one discrete solution against the exact field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub h: f64,
    pub dofs: usize,
    pub l2: f64,
    /// Broken `H^1` seminorm of the error, phase by phase.
    pub h1: f64,
    /// Energy norm of (nodal interpolant - discrete solution).
    pub energy: f64,
    /// `L^2(Gamma)` distance of the measured flux jump from `g`.
    pub flux_jump: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub case: String,
    pub degree: u32,
    pub rows: Vec<StudyRow>,
    pub l2_rate: f64,
    pub h1_rate: f64,
    pub energy_rate: f64,
    pub flux_rate: f64,
    /// Every error column decreases under refinement.
    pub monotone: bool,
}

fn is_halving(hs: &[f64]) -> bool {
    hs.windows(2).all(|w| {
        let r = w[0] / w[1];
        (1.9..=2.1).contains(&r)
    })
}

/// Errors of a solution on `mesh` against the case's exact solution.
pub fn measure_errors(case: &ManufacturedCase, mesh: &InterfaceMesh, sol: &TwoPhaseSolution) -> StudyRow {
    let rule = TRIANGLE_DEGREE6;
    // on the periodic box both fields are compared with their means removed
    let shift = if mesh.is_periodic() {
        let mut total = 0.0;
        let mut area = 0.0;
        for k in 0..mesh.triangles.len() {
            let e = element(mesh, k);
            for (l, w) in rule.points.iter().zip(rule.weights) {
                let x = e.point(*l);
                total += w * e.area * (case.exact)(x, mesh.phase_at(k, x));
            }
            area += e.area;
        }
        total / area
    } else {
        0.0
    };
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let mut energy = 0.0;
    let interp: Vec<f64> = {
        // nodal interpolant; dof points off the curve take the value of their
        // owning phase from the first element that lists them
        let mut v = vec![f64::NAN; sol.space.ndof];
        for (k, dofs) in sol.space.cell_dofs.iter().enumerate() {
            for &d in &dofs[..sol.space.local_count()] {
                if v[d].is_nan() {
                    v[d] = (case.exact)(sol.space.dof_points[d], mesh.phases[k]) - shift;
                }
            }
        }
        v
    };
    for (k, dofs) in sol.space.cell_dofs.iter().enumerate() {
        let e = element(mesh, k);
        let vals: Vec<f64> = (0..sol.space.local_count()).map(|i| sol.values[0][dofs[i]]).collect();
        let a_here = &sol.coefficient;
        for (l, w) in rule.points.iter().zip(rule.weights) {
            let x = e.point(*l);
            let phase = mesh.phase_at(k, x);
            let (v, g) = e.shape(sol.space.degree, *l);
            let mut uh = 0.0;
            let mut guh = [0.0; 2];
            let mut gdiff = [0.0; 2];
            for i in 0..sol.space.local_count() {
                uh += v[i] * vals[i];
                guh[0] += g[i][0] * vals[i];
                guh[1] += g[i][1] * vals[i];
                let di = interp[dofs[i]] - vals[i];
                gdiff[0] += g[i][0] * di;
                gdiff[1] += g[i][1] * di;
            }
            let u = (case.exact)(x, phase) - shift;
            let gu = (case.gradient)(x, phase);
            let wa = w * e.area;
            l2 += wa * (uh - u).powi(2);
            h1 += wa * ((guh[0] - gu[0]).powi(2) + (guh[1] - gu[1]).powi(2));
            let ag = apply(&a_here.at(x, phase), gdiff);
            energy += wa * (gdiff[0] * ag[0] + gdiff[1] * ag[1]);
        }
    }
    let samples = measure_interface_jump(sol, mesh, JumpQuantity::Flux);
    let flux_jump = jump_l2_error(&samples, |x, n| vec![(case.flux_jump)(x, n)]);
    StudyRow {
        h: mesh.h,
        dofs: sol.space.ndof,
        l2: l2.sqrt(),
        h1: h1.sqrt(),
        energy: energy.max(0.0).sqrt(),
        flux_jump,
        iterations: sol.report.cg.iter().map(|r| r.iterations).sum(),
    }
}

/// Solve the case on each mesh size and fit log-log slopes.
pub fn convergence_study(case: &ManufacturedCase, hs: &[f64], opts: SolveOptions) -> Result<RateTable> {
    if hs.len() < 3 {
        return Err(Error::Precondition(format!("need at least 3 mesh sizes, got {}", hs.len())));
    }
    if !is_halving(hs) {
        return Err(Error::Precondition(format!("mesh sizes must halve successively, got {hs:?}")));
    }
    let mut rows = Vec::with_capacity(hs.len());
    for &h in hs {
        let mesh = mesh_from_contour(&case.contour, h, case.outer)?;
        let sol = solve_weak(&case.problem, &mesh, opts)?;
        rows.push(measure_errors(case, &mesh, &sol));
    }
    let lh: Vec<f64> = rows.iter().map(|r| r.h.ln()).collect();
    let rate = |f: &dyn Fn(&StudyRow) -> f64| {
        let ly: Vec<f64> = rows.iter().map(|r| f(r).ln()).collect();
        linear_slope(&lh, &ly)
    };
    let monotone = rows.windows(2).all(|w| {
        w[1].l2 < w[0].l2 && w[1].h1 < w[0].h1 && w[1].energy < w[0].energy && w[1].flux_jump < w[0].flux_jump
    });
    if !monotone {
        log::warn!("{}: errors are not monotone under refinement", case.name);
    }
    Ok(RateTable {
        case: case.name.clone(),
        degree: opts.degree.order(),
        l2_rate: rate(&|r| r.l2),
        h1_rate: rate(&|r| r.h1),
        energy_rate: rate(&|r| r.energy),
        flux_rate: rate(&|r| r.flux_jump),
        rows,
        monotone,
    })
}

impl RateTable {
    /// `h,dofs,l2,h1,energy,flux_jump,iterations` rows followed by a `rate` row.
    pub fn to_csv(&self) -> String {
        use crate::textio::fmt17;
        let mut s = String::from("h,dofs,l2,h1,energy,flux_jump,iterations\n");
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{},{},{}\n",
                fmt17(r.h),
                r.dofs,
                fmt17(r.l2),
                fmt17(r.h1),
                fmt17(r.energy),
                fmt17(r.flux_jump),
                r.iterations
            );
        }
        s += &format!(
            "rate,,{},{},{},{},\n",
            fmt17(self.l2_rate),
            fmt17(self.h1_rate),
            fmt17(self.energy_rate),
            fmt17(self.flux_rate)
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layered_fields_match_finite_differences() {
        for m in [1, 3] {
            let f = layered(m, 0.7);
            let p = [0.4, -0.3];
            let d = 1e-4;
            let (_, g, lap) = f(p, Phase::Plus);
            let v = |x: f64, y: f64| f([x, y], Phase::Plus).0;
            let gx = (v(p[0] + d, p[1]) - v(p[0] - d, p[1])) / (2.0 * d);
            let gy = (v(p[0], p[1] + d) - v(p[0], p[1] - d)) / (2.0 * d);
            let l = (v(p[0] + d, p[1]) + v(p[0] - d, p[1]) + v(p[0], p[1] + d) + v(p[0], p[1] - d) - 4.0 * v(p[0], p[1]))
                / (d * d);
            assert!((gx - g[0]).abs() < 1e-7 && (gy - g[1]).abs() < 1e-7);
            assert!((l - lap).abs() < 1e-4, "m={m}: {l} vs {lap}");
        }
    }

    #[test]
    fn sizes_must_halve() {
        let c = ManufacturedCase::kinked_circle();
        assert!(matches!(convergence_study(&c, &[0.2, 0.1], SolveOptions::default()), Err(Error::Precondition(_))));
        assert!(matches!(
            convergence_study(&c, &[0.2, 0.15, 0.1], SolveOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn periodic_case_converges() {
        let case = ManufacturedCase::periodic_kinked();
        let t = convergence_study(&case, &[0.4, 0.2, 0.1], SolveOptions::default()).unwrap();
        assert!((t.l2_rate - 2.0).abs() < 0.3, "{t:?}");
    }
}
