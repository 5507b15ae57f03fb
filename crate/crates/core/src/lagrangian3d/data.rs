//! Initial data for 3-D patches: smoothed vorticity, the matching periodic
//! velocity and a triangulated sample surface for the tangency diagnostic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::deriv::Differentiator;
use super::grid::{Grid3, PeriodicField3D, Rank, Vec3};
use super::kinematics::vector_field;
use crate::error::{Error, Result};

/// Closed triangulated surface with unit outward normals at the vertices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Latitude-longitude sphere; poles are single vertices.
    pub fn sphere(radius: f64, rings: usize, segments: usize) -> Self {
        let mut s = Self::default();
        let mut push = |n: Vec3| {
            s.vertices.push(n.map(|c| radius * c));
            s.normals.push(n);
        };
        push([0.0, 0.0, 1.0]);
        for i in 1..rings {
            let th = PI * i as f64 / rings as f64;
            for j in 0..segments {
                let ph = 2.0 * PI * j as f64 / segments as f64;
                push([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
            }
        }
        push([0.0, 0.0, -1.0]);
        let south = 1 + (rings - 1) * segments;
        let at = |i: usize, j: usize| 1 + (i - 1) * segments + j % segments;
        for j in 0..segments {
            s.triangles.push([0, at(1, j), at(1, j + 1)]);
            s.triangles.push([south, at(rings - 1, j + 1), at(rings - 1, j)]);
        }
        for i in 1..rings - 1 {
            for j in 0..segments {
                s.triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                s.triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        s
    }

    /// Torus around the `x3` axis with the given centre-line and tube radii.
    pub fn torus(major: f64, minor: f64, around: usize, tube: usize) -> Self {
        let mut s = Self::default();
        for i in 0..around {
            let ph = 2.0 * PI * i as f64 / around as f64;
            for j in 0..tube {
                let th = 2.0 * PI * j as f64 / tube as f64;
                let n = [th.cos() * ph.cos(), th.cos() * ph.sin(), th.sin()];
                let r = major + minor * th.cos();
                s.vertices.push([r * ph.cos(), r * ph.sin(), minor * th.sin()]);
                s.normals.push(n);
            }
        }
        let at = |i: usize, j: usize| (i % around) * tube + j % tube;
        for i in 0..around {
            for j in 0..tube {
                s.triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                s.triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        s
    }
}

/// Initial-data presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Preset {
    /// `omega0 = s chi(r) (-x2, x1, 0)` inside a ball.
    Ball { radius: f64, strength: f64 },
    /// `omega0 = s chi(rho) e_phi` inside a solid torus, `rho` the distance to the centre circle.
    Ring { major: f64, minor: f64, strength: f64 },
    /// Vorticity read from a vector snapshot; the support is where it is nonzero.
    File { path: std::path::PathBuf },
}

/// Smooth step equal to 1 for `s <= 0` and 0 for `s >= 1`, infinitely differentiable.
pub fn smooth_cutoff(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let f = |t: f64| (-1.0 / t).exp();
    f(1.0 - s) / (f(1.0 - s) + f(s))
}

/// Indicator of `{d < edge}` smoothed inward over `band`: 1 for `d <= edge - band`, 0 for `d >= edge`.
pub fn smoothed_indicator(d: f64, edge: f64, band: f64) -> f64 {
    smooth_cutoff((d - (edge - band)) / band)
}

#[derive(Debug, Clone)]
pub struct PatchData3D {
    pub grid: Grid3,
    pub omega0: PeriodicField3D,
    pub u0: PeriodicField3D,
    /// Plus-phase nodes: the support of `omega0`.
    pub support: Vec<bool>,
    pub surface: SurfaceMesh,
    pub band: f64,
}

impl PatchData3D {
    /// Builds data from a vorticity field: the velocity is the periodic
    /// Biot-Savart field `u0 = curl(-Lap)^-1 omega0`.
    pub fn from_vorticity(omega0: PeriodicField3D, surface: SurfaceMesh, band: f64, diff: &Differentiator) -> Result<Self> {
        if omega0.rank != Rank::Vector {
            return Err(Error::InvalidInput("vorticity must be a vector field".into()));
        }
        let grid = omega0.grid;
        let inv = diff.inverse_laplacian();
        let comps = (0..3).map(|c| inv.solve(omega0.component(c))).collect();
        let stream = PeriodicField3D::from_components(grid, comps)?;
        let mut u0 = diff.curl(&stream);
        u0.subtract_mean();
        let support = (0..grid.nodes()).map(|p| omega0.vector_at(p) != [0.0; 3]).collect();
        Ok(Self {
            grid,
            omega0,
            u0,
            support,
            surface,
            band,
        })
    }

    pub fn zero(grid: Grid3) -> Self {
        Self {
            grid,
            omega0: PeriodicField3D::zeros(grid, Rank::Vector),
            u0: PeriodicField3D::zeros(grid, Rank::Vector),
            support: vec![false; grid.nodes()],
            surface: SurfaceMesh::default(),
            band: 0.0,
        }
    }

    /// Preset data with a smoothing band of absolute width `band`. The
    /// sample surface is the level set in the middle of the band.
    pub fn preset(preset: &Preset, grid: Grid3, band: f64, diff: &Differentiator) -> Result<Self> {
        if !(band > 0.0) {
            return Err(Error::InvalidInput(format!("smoothing band must be positive, got {band}")));
        }
        match preset {
            Preset::Ball { radius, strength } => {
                let (r0, s) = (*radius, *strength);
                check_fits(grid, r0, band)?;
                let rows: Vec<Vec3> = (0..grid.nodes())
                    .map(|p| {
                        let x = grid.point(p);
                        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                        let chi = smoothed_indicator(r, r0, band);
                        if chi == 0.0 {
                            [0.0; 3]
                        } else {
                            [-s * chi * x[1], s * chi * x[0], 0.0]
                        }
                    })
                    .collect();
                let surface = SurfaceMesh::sphere(r0 - 0.5 * band, 12, 24);
                Self::from_vorticity(vector_field(grid, &rows), surface, band, diff)
            }
            Preset::Ring { major, minor, strength } => {
                let (big, small, s) = (*major, *minor, *strength);
                if small >= big {
                    return Err(Error::InvalidInput(format!("ring tube radius {small} must be below {big}")));
                }
                check_fits(grid, big + small, band)?;
                if small <= band {
                    return Err(Error::InvalidInput(format!("ring tube radius {small} must exceed the band {band}")));
                }
                let rows: Vec<Vec3> = (0..grid.nodes())
                    .map(|p| {
                        let x = grid.point(p);
                        let radial = x[0].hypot(x[1]);
                        let rho = (radial - big).hypot(x[2]);
                        let chi = smoothed_indicator(rho, small, band);
                        if chi == 0.0 {
                            [0.0; 3]
                        } else {
                            [-s * chi * x[1] / radial, s * chi * x[0] / radial, 0.0]
                        }
                    })
                    .collect();
                let surface = SurfaceMesh::torus(big, small - 0.5 * band, 32, 12);
                Self::from_vorticity(vector_field(grid, &rows), surface, band, diff)
            }
            Preset::File { path } => {
                let snap = super::snapshot::read_file(path)?;
                if snap.field.grid.n != grid.n || (snap.field.grid.ell - grid.ell).abs() > 1e-12 * grid.ell {
                    return Err(Error::InvalidInput(format!(
                        "snapshot grid {:?} / {} does not match the configured grid {:?} / {}",
                        snap.field.grid.n, snap.field.grid.ell, grid.n, grid.ell
                    )));
                }
                Self::from_vorticity(snap.field, SurfaceMesh::default(), band, diff)
            }
        }
    }

    /// `max |div u0|` over the nodes.
    pub fn velocity_divergence(&self, diff: &Differentiator) -> f64 {
        diff.divergence(&self.u0).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `|int_{plus} omega0|` by grid quadrature.
    pub fn vorticity_mean(&self) -> f64 {
        let w = self.omega0.integral();
        (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt()
    }
}

fn check_fits(grid: Grid3, extent: f64, band: f64) -> Result<()> {
    if !(extent > band) || extent >= grid.ell {
        return Err(Error::InvalidInput(format!(
            "patch extent {extent} must exceed the band {band} and stay inside the box half-length {}",
            grid.ell
        )));
    }
    Ok(())
}
