//! Biot-Savart velocity of a piecewise-constant vorticity patch, reduced to a
//! boundary integral with logarithmic kernel:
//!
//! `u(x) = -(dw / 2 pi) * closed_integral log|x - z(t)| z'(t) dt + (w_minus / 2) (-x2, x1)`
//!
//! where `dw = w_plus - w_minus` and the curve is counterclockwise. The second
//! term is the rigid rotation carried by a uniform background vorticity.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::contour::{Contour, Vec2};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Vorticity inside and outside the patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchVorticity {
    pub omega_plus: f64,
    pub omega_minus: f64,
}

impl Default for PatchVorticity {
    fn default() -> Self {
        Self {
            omega_plus: 1.0,
            omega_minus: 0.0,
        }
    }
}

impl PatchVorticity {
    pub fn uniform(omega: f64) -> Self {
        Self {
            omega_plus: omega,
            omega_minus: 0.0,
        }
    }

    pub fn jump(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }

    pub fn is_quiescent(&self) -> bool {
        self.omega_plus == 0.0 && self.omega_minus == 0.0
    }

    fn validate(&self) -> Result<()> {
        if self.omega_plus.is_finite() && self.omega_minus.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput("vorticity values must be finite".into()))
        }
    }
}

pub type Mat2 = [[f64; 2]; 2];

/// How the sup of the velocity gradient is measured over a sample cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientNorm {
    /// Largest absolute entry of the 2x2 gradient.
    #[default]
    MaxEntry,
    Frobenius,
}

impl GradientNorm {
    pub fn of(&self, g: &Mat2) -> f64 {
        match self {
            GradientNorm::MaxEntry => g
                .iter()
                .flat_map(|r| r.iter())
                .map(|v| v.abs())
                .fold(0.0, f64::max),
            GradientNorm::Frobenius => g
                .iter()
                .flat_map(|r| r.iter())
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt(),
        }
    }
}

fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

const REQUESTED_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 48;

/// Prepared boundary quadrature for repeated Biot-Savart evaluations.
#[derive(Debug, Clone)]
pub struct BiotSavart {
    contour: Contour,
    vort: PatchVorticity,
    nodes: Vec<Vec2>,
    tangents: Vec<Vec2>,
    /// trapezoid spacing in physical units, `2 pi max|z'| / m`
    spacing: f64,
    max_speed: f64,
}

impl BiotSavart {
    pub fn new(contour: &Contour, vort: PatchVorticity) -> Result<Self> {
        vort.validate()?;
        let contour = contour.canonical();
        let m = (16 * contour.band()).max(256);
        let s = contour.sample(m)?;
        let max_speed = s
            .tangents
            .iter()
            .map(|t| t[0].hypot(t[1]))
            .fold(0.0, f64::max);
        Ok(Self {
            spacing: 2.0 * PI * max_speed / m as f64,
            nodes: s.points,
            tangents: s.tangents,
            contour,
            vort,
            max_speed,
        })
    }

    /// Width of the band around the curve inside which subdivided quadrature is used.
    pub fn near_band(&self) -> f64 {
        6.0 * self.spacing
    }

    fn min_node_distance(&self, x: Vec2) -> f64 {
        self.nodes
            .iter()
            .map(|p| (p[0] - x[0]).hypot(p[1] - x[1]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Integrates `closed_integral f(t) dt`, where `f` receives `(z, z')`.
    fn boundary_integral<const K: usize, F>(&self, x: Vec2, f: F) -> Result<[f64; K]>
    where
        F: Fn(Vec2, Vec2) -> [f64; K] + Sync,
    {
        let m = self.nodes.len();
        if self.min_node_distance(x) > self.near_band() {
            let mut acc = [0.0; K];
            for (z, dz) in self.nodes.iter().zip(&self.tangents) {
                let v = f(*z, *dz);
                for k in 0..K {
                    acc[k] += v[k];
                }
            }
            let w = 2.0 * PI / m as f64;
            return Ok(acc.map(|a| a * w));
        }
        // near-singular: adaptive Gauss-Legendre on panels
        let panels = m / 16;
        let width = 2.0 * PI / panels as f64;
        let mut acc = [0.0; K];
        let mut err = 0.0f64;
        for p in 0..panels {
            let a = p as f64 * width;
            let (v, e) = self.adaptive(&f, x, a, a + width, 0);
            err += e;
            for k in 0..K {
                acc[k] += v[k];
            }
        }
        if err > 100.0 * REQUESTED_TOL * self.max_speed.max(1e-300) {
            return Err(Error::Quadrature {
                achieved: err,
                requested: REQUESTED_TOL,
            });
        }
        Ok(acc)
    }

    /// Gauss-Legendre panel sum, the panel's arc length and its distance to `x`.
    fn panel<const K: usize, F>(&self, f: &F, x: Vec2, a: f64, b: f64) -> ([f64; K], f64, f64)
    where
        F: Fn(Vec2, Vec2) -> [f64; K],
    {
        let gl = gl16();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; K];
        let mut length = 0.0;
        let mut dist = f64::INFINITY;
        for (t, w) in gl.nodes.iter().zip(&gl.weights) {
            let (z, dz) = self.contour.eval(mid + half * t);
            let v = f(z, dz);
            for k in 0..K {
                acc[k] += w * half * v[k];
            }
            length += w * half * dz[0].hypot(dz[1]);
            dist = dist.min((z[0] - x[0]).hypot(z[1] - x[1]));
        }
        (acc, length, dist)
    }

    /// Bisection until every panel is no longer than its distance to `x`,
    /// where the 16-point rule is accurate to round-off. Returns the value and
    /// the two-level difference left on panels that hit the depth limit.
    fn adaptive<const K: usize, F>(&self, f: &F, x: Vec2, a: f64, b: f64, depth: u32) -> ([f64; K], f64)
    where
        F: Fn(Vec2, Vec2) -> [f64; K],
    {
        let (whole, length, dist) = self.panel(f, x, a, b);
        if length <= dist {
            return (whole, 0.0);
        }
        let mid = 0.5 * (a + b);
        if depth >= MAX_DEPTH {
            let (left, _, _) = self.panel(f, x, a, mid);
            let (right, _, _) = self.panel(f, x, mid, b);
            let mut split = [0.0; K];
            let mut diff = 0.0f64;
            for k in 0..K {
                split[k] = left[k] + right[k];
                diff = diff.max((split[k] - whole[k]).abs());
            }
            return (split, diff);
        }
        let (l, el) = self.adaptive(f, x, a, mid, depth + 1);
        let (r, er) = self.adaptive(f, x, mid, b, depth + 1);
        let mut out = [0.0; K];
        for k in 0..K {
            out[k] = l[k] + r[k];
        }
        (out, el + er)
    }

    pub fn velocity(&self, x: Vec2) -> Result<Vec2> {
        let jump = self.vort.jump();
        let mut u = [0.0, 0.0];
        if jump != 0.0 {
            let integral = self.boundary_integral(x, |z, dz| {
                let r = (x[0] - z[0]).hypot(x[1] - z[1]);
                let l = r.ln();
                [l * dz[0], l * dz[1]]
            })?;
            let c = -jump / (2.0 * PI);
            u = [c * integral[0], c * integral[1]];
        }
        let w = 0.5 * self.vort.omega_minus;
        Ok([u[0] - w * x[1], u[1] + w * x[0]])
    }

    /// `grad[i][k] = d u_i / d x_k`.
    pub fn gradient(&self, x: Vec2) -> Result<Mat2> {
        let jump = self.vort.jump();
        let mut g = [[0.0; 2]; 2];
        if jump != 0.0 {
            let integral = self.boundary_integral(x, |z, dz| {
                let d = [x[0] - z[0], x[1] - z[1]];
                let r2 = d[0] * d[0] + d[1] * d[1];
                [
                    d[0] / r2 * dz[0],
                    d[1] / r2 * dz[0],
                    d[0] / r2 * dz[1],
                    d[1] / r2 * dz[1],
                ]
            })?;
            let c = -jump / (2.0 * PI);
            g = [
                [c * integral[0], c * integral[1]],
                [c * integral[2], c * integral[3]],
            ];
        }
        let w = 0.5 * self.vort.omega_minus;
        g[0][1] -= w;
        g[1][0] += w;
        Ok(g)
    }

    pub fn contour(&self) -> &Contour {
        &self.contour
    }
}

pub fn patch_velocity(contour: &Contour, vort: PatchVorticity, x: Vec2) -> Result<Vec2> {
    BiotSavart::new(contour, vort)?.velocity(x)
}

pub fn velocity_gradient(contour: &Contour, vort: PatchVorticity, x: Vec2) -> Result<Mat2> {
    BiotSavart::new(contour, vort)?.gradient(x)
}

/// Sup of the velocity gradient over a user-supplied sample cloud. This is a
/// sampled estimate, never a true `L^inf` value.
pub fn velocity_gradient_sup(
    contour: &Contour,
    vort: PatchVorticity,
    samples: &[Vec2],
    norm: GradientNorm,
) -> Result<f64> {
    use rayon::prelude::*;
    let bs = BiotSavart::new(contour, vort)?;
    let values: Vec<f64> = samples
        .par_iter()
        .map(|&x| bs.gradient(x).map(|g| norm.of(&g)))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// Kress product-quadrature weights for `integral log|2 sin((t - s)/2)| f(s) ds`
/// on `m` (even) uniform nodes, indexed by `(i - j) mod m`.
pub fn log_sine_weights(m: usize) -> Vec<f64> {
    assert!(m % 2 == 0 && m >= 4, "Kress weights need an even node count");
    let n = m / 2;
    (0..m)
        .map(|d| {
            let t = 2.0 * PI * d as f64 / m as f64;
            let mut s = 0.0;
            for k in 1..n {
                s += (k as f64 * t).cos() / k as f64;
            }
            let r = -(2.0 * PI / n as f64) * s - PI / (n * n) as f64 * (n as f64 * t).cos();
            0.5 * r
        })
        .collect()
}

/// Velocity at the nodes of the curve itself (uniform parameter grid, `m`
/// even), with the logarithmic singularity split off and integrated exactly
/// against the trigonometric interpolant.
pub fn boundary_velocity(points: &[Vec2], tangents: &[Vec2], vort: PatchVorticity) -> Vec<Vec2> {
    use rayon::prelude::*;
    let m = points.len();
    let jump = vort.jump();
    let w = 0.5 * vort.omega_minus;
    if jump == 0.0 {
        return points.iter().map(|p| [-w * p[1], w * p[0]]).collect();
    }
    let kress = log_sine_weights(m);
    let log_sine: Vec<f64> = (0..m)
        .map(|d| {
            if d == 0 {
                0.0
            } else {
                (2.0 * (PI * d as f64 / m as f64).sin()).abs().ln()
            }
        })
        .collect();
    let h = 2.0 * PI / m as f64;
    let c = -jump / (2.0 * PI);
    (0..m)
        .into_par_iter()
        .map(|i| {
            let zi = points[i];
            let mut acc = [0.0, 0.0];
            for j in 0..m {
                let d = (i + m - j) % m;
                let smooth = if j == i {
                    tangents[i][0].hypot(tangents[i][1]).ln()
                } else {
                    (zi[0] - points[j][0]).hypot(zi[1] - points[j][1]).ln() - log_sine[d]
                };
                let weight = kress[d] + h * smooth;
                acc[0] += weight * tangents[j][0];
                acc[1] += weight * tangents[j][1];
            }
            [c * acc[0] - w * zi[1], c * acc[1] + w * zi[0]]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rankine(x: Vec2) -> Vec2 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 <= 1.0 {
            [-0.5 * x[1], 0.5 * x[0]]
        } else {
            [-0.5 * x[1] / r2, 0.5 * x[0] / r2]
        }
    }

    #[test]
    fn rankine_reference_points() {
        let c = Contour::circle(1.0, 16);
        let v = PatchVorticity::default();
        let u0 = patch_velocity(&c, v, [0.0, 0.0]).unwrap();
        assert!(u0[0].abs() < 1e-14 && u0[1].abs() < 1e-14);
        let u = patch_velocity(&c, v, [2.0, 0.0]).unwrap();
        assert!(u[0].abs() < 1e-13 && (u[1] - 0.25).abs() < 1e-13, "{u:?}");
        let u = patch_velocity(&c, v, [0.5, 0.0]).unwrap();
        assert!(u[0].abs() < 1e-13 && (u[1] - 0.25).abs() < 1e-13, "{u:?}");
    }

    #[test]
    fn near_boundary_points_use_subdivision() {
        let c = Contour::circle(1.0, 16);
        let bs = BiotSavart::new(&c, PatchVorticity::default()).unwrap();
        for r in [1.0 - 1e-3, 1.0 + 1e-4, 1.0 - 1e-6] {
            let x = [r * 0.3f64.cos(), r * 0.3f64.sin()];
            assert!(bs.min_node_distance(x) < bs.near_band());
            let u = bs.velocity(x).unwrap();
            let e = rankine(x);
            assert!((u[0] - e[0]).abs() < 1e-11 && (u[1] - e[1]).abs() < 1e-11, "r={r}");
        }
    }

    #[test]
    fn clockwise_input_gives_same_velocity() {
        let c = Contour::ellipse(2.0, 1.0, 8);
        let v = PatchVorticity::default();
        let a = patch_velocity(&c, v, [3.0, 1.0]).unwrap();
        let b = patch_velocity(&c.reversed(), v, [3.0, 1.0]).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    }

    #[test]
    fn rigid_rotation_gradient_inside_disk() {
        let c = Contour::circle(1.0, 16);
        let v = PatchVorticity::default();
        let samples = [[0.0, 0.0], [0.3, 0.2], [-0.5, 0.1]];
        let sup = velocity_gradient_sup(&c, v, &samples, GradientNorm::MaxEntry).unwrap();
        assert!((sup - 0.5).abs() < 1e-12);
        let fro = velocity_gradient_sup(&c, v, &samples, GradientNorm::Frobenius).unwrap();
        assert!((fro - 0.5f64.sqrt()).abs() < 1e-12);
        let none = velocity_gradient_sup(&c, PatchVorticity::uniform(0.0), &samples, GradientNorm::MaxEntry)
            .unwrap();
        assert_eq!(none, 0.0);
    }

    #[test]
    fn gradient_matches_finite_difference_outside() {
        let c = Contour::circle(1.0, 16);
        let bs = BiotSavart::new(&c, PatchVorticity::default()).unwrap();
        let x = [2.0, 0.0];
        let g = bs.gradient(x).unwrap();
        let h = 1e-5;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let up = bs.velocity(xp).unwrap();
            let um = bs.velocity(xm).unwrap();
            for i in 0..2 {
                let fd = (up[i] - um[i]) / (2.0 * h);
                assert!((fd - g[i][k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn background_vorticity_adds_rigid_rotation() {
        let c = Contour::circle(1.0, 16);
        let v = PatchVorticity {
            omega_plus: 1.0,
            omega_minus: 1.0,
        };
        // uniform vorticity 1 everywhere
        let u = patch_velocity(&c, v, [2.0, 0.0]).unwrap();
        assert!(u[0].abs() < 1e-13 && (u[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kress_weights_integrate_cosine_exactly() {
        let m = 16;
        let w = log_sine_weights(m);
        // integral of log|2 sin(s/2)| cos(s) ds = -pi
        let s: f64 = (0..m)
            .map(|j| w[(m - j) % m] * (2.0 * PI * j as f64 / m as f64).cos())
            .sum();
        assert!((s + PI).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!(total.abs() < 1e-13);
    }

    #[test]
    fn boundary_velocity_on_rankine_circle() {
        let c = Contour::circle(1.0, 8);
        let s = c.sample(32).unwrap();
        let u = boundary_velocity(&s.points, &s.tangents, PatchVorticity::default());
        for (p, v) in s.points.iter().zip(&u) {
            assert!((v[0] + 0.5 * p[1]).abs() < 1e-14 && (v[1] - 0.5 * p[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_velocity_matches_off_curve_limit() {
        let c = Contour::ellipse(2.0, 1.0, 16);
        let s = c.sample(96).unwrap();
        let u = boundary_velocity(&s.points, &s.tangents, PatchVorticity::default());
        let bs = BiotSavart::new(&c, PatchVorticity::default()).unwrap();
        for j in [0usize, 7, 30] {
            let on = bs.velocity(s.points[j]).unwrap();
            assert!((on[0] - u[j][0]).abs() < 1e-10 && (on[1] - u[j][1]).abs() < 1e-10);
        }
    }
}
