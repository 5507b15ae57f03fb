//! Biharmonic extensions of a patch boundary into the unit disk and into the
//! annulus `1 <= r <= R`, solved exactly per angular Fourier mode.
//!
//! Boundary data on the unit circle are the contour itself and, for the
//! radial derivative, `d/dtheta` of `z^perp` with `(a, b)^perp = (b, -a)`.
//! With this convention the unit circle extends to the identity map.

mod basis;
pub mod checks;
mod export;
mod norm;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour2d::{Contour, Vec2};
use crate::error::{Error, Result};

pub use basis::{annulus_mode_coefficients, disk_mode_coefficients, radial_basis, Radial};
pub use export::{from_text, to_text};
pub use norm::{disk_sobolev_norm, roughening_family, sobolev_gain_ratio};

pub type Mat2 = [[f64; 2]; 2];

/// Largest accepted condition number of a per-mode annulus system.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Disk,
    Annulus,
}

impl Side {
    pub fn basis_len(&self) -> usize {
        match self {
            Side::Disk => 2,
            Side::Annulus => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Side::Disk => "disk",
            Side::Annulus => "annulus",
        }
    }
}

/// Per-mode radial coefficients of a biharmonic map.
#[derive(Debug, Clone, PartialEq)]
pub struct BiharmonicMap {
    side: Side,
    band: usize,
    /// Outer radius of the annulus; 1 for the disk.
    radius: f64,
    /// `coeffs[n + N][component][j]` multiplies `radial_basis(side, n, j)`.
    coeffs: Vec<[Vec<Complex64>; 2]>,
    /// Largest per-mode condition number encountered (1 on the disk).
    pub condition: f64,
}

/// Radial derivative data `d/dtheta z^perp` for mode `n`.
fn neumann_data(c: [Complex64; 2], n: i64) -> [Complex64; 2] {
    let i_n = Complex64::new(0.0, n as f64);
    [i_n * c[1], -i_n * c[0]]
}

/// Fourier data of the identity map at radius `r`: value and radial derivative.
fn identity_data(n: i64, r: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let zero = Complex64::new(0.0, 0.0);
    match n {
        1 | -1 => {
            let s = n as f64;
            (
                [Complex64::new(r / 2.0, 0.0), Complex64::new(0.0, -s * r / 2.0)],
                [Complex64::new(0.5, 0.0), Complex64::new(0.0, -s * 0.5)],
            )
        }
        _ => ([zero; 2], [zero; 2]),
    }
}

pub fn solve_disk_extension(contour: &Contour) -> BiharmonicMap {
    let band = contour.band();
    let coeffs = (-(band as i64)..=band as i64)
        .map(|n| {
            let v = contour.coeff(n);
            let d = neumann_data(v, n);
            let x = disk_mode_coefficients(n, v[0], d[0]);
            let y = disk_mode_coefficients(n, v[1], d[1]);
            [x.to_vec(), y.to_vec()]
        })
        .collect();
    BiharmonicMap {
        side: Side::Disk,
        band,
        radius: 1.0,
        coeffs,
        condition: 1.0,
    }
}

/// Default outer radius `2 max|z| + 1`.
pub fn default_outer_radius(contour: &Contour) -> f64 {
    2.0 * contour.max_radius() + 1.0
}

pub fn solve_annulus_extension(contour: &Contour, radius: f64) -> Result<BiharmonicMap> {
    if !(radius > 1.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!("outer radius must exceed 1, got {radius}")));
    }
    let reach = contour.max_radius();
    if reach >= radius {
        return Err(Error::Precondition(format!(
            "contour reaches radius {reach}, outside the outer circle r = {radius}"
        )));
    }
    let band = contour.band();
    let mut coeffs = Vec::with_capacity(2 * band + 1);
    let mut condition = 1.0f64;
    for n in -(band as i64)..=band as i64 {
        let v = contour.coeff(n);
        let d = neumann_data(v, n);
        let (vo, dout) = identity_data(n, radius);
        let mut pair: [Vec<Complex64>; 2] = [Vec::new(), Vec::new()];
        for c in 0..2 {
            let (a, cond) = annulus_mode_coefficients(n, radius, [v[c], d[c], vo[c], dout[c]])?;
            condition = condition.max(cond);
            pair[c] = a.to_vec();
        }
        coeffs.push(pair);
    }
    Ok(BiharmonicMap {
        side: Side::Annulus,
        band,
        radius,
        coeffs,
        condition,
    })
}

/// Values of a map and its first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapJet {
    pub value: Vec2,
    /// `d/dr` of each component.
    pub radial: Vec2,
    /// `(1/r) d/dtheta` of each component.
    pub angular: Vec2,
}

impl BiharmonicMap {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn outer_radius(&self) -> f64 {
        self.radius
    }

    pub fn mode(&self, n: i64) -> &[Vec<Complex64>; 2] {
        &self.coeffs[(n + self.band as i64) as usize]
    }

    pub(crate) fn from_parts(side: Side, band: usize, radius: f64, coeffs: Vec<[Vec<Complex64>; 2]>) -> Self {
        Self {
            side,
            band,
            radius,
            coeffs,
            condition: 1.0,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self.side {
            Side::Disk => (0.0, 1.0),
            Side::Annulus => (1.0, self.radius),
        }
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * hi;
        if r.is_nan() || r < lo - slack || r > hi + slack {
            return Err(Error::OutsideDomain { r, lo, hi });
        }
        Ok(())
    }

    pub fn jet(&self, r: f64, theta: f64) -> Result<MapJet> {
        self.check_domain(r)?;
        let mut value = [0.0; 2];
        let mut radial = [0.0; 2];
        let mut angular = [0.0; 2];
        let step = Complex64::from_polar(1.0, theta);
        let mut e = Complex64::new(1.0, 0.0);
        for n in 0..=self.band as i64 {
            let weight = if n == 0 { 1.0 } else { 2.0 };
            let rad: Vec<Radial> = (0..self.side.basis_len())
                .map(|j| radial_basis(self.side, n, j, r, self.radius))
                .collect();
            let mode = self.mode(n);
            for c in 0..2 {
                let mut f = Complex64::new(0.0, 0.0);
                let mut df = Complex64::new(0.0, 0.0);
                let mut fr = Complex64::new(0.0, 0.0);
                for (a, b) in mode[c].iter().zip(&rad) {
                    f += a * b.value;
                    df += a * b.slope;
                    fr += a * b.over_r;
                }
                value[c] += weight * (f * e).re;
                radial[c] += weight * (df * e).re;
                angular[c] += weight * (fr * e * Complex64::new(0.0, n as f64)).re;
            }
            e *= step;
        }
        Ok(MapJet {
            value,
            radial,
            angular,
        })
    }

    pub fn evaluate(&self, r: f64, theta: f64) -> Result<Vec2> {
        Ok(self.jet(r, theta)?.value)
    }

    /// Cartesian Jacobian `J[i][k] = dZ_i/dx_k`.
    pub fn jacobian(&self, r: f64, theta: f64) -> Result<Mat2> {
        let j = self.jet(r, theta)?;
        let (s, c) = theta.sin_cos();
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            out[i][0] = c * j.radial[i] - s * j.angular[i];
            out[i][1] = s * j.radial[i] + c * j.angular[i];
        }
        Ok(out)
    }

    pub fn jacobian_det(&self, r: f64, theta: f64) -> Result<f64> {
        let j = self.jacobian(r, theta)?;
        Ok(j[0][0] * j[1][1] - j[0][1] * j[1][0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_gives_identity_on_disk() {
        let m = solve_disk_extension(&Contour::circle(1.0, 4));
        let p = m.evaluate(0.5, 0.0).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && p[1].abs() < 1e-15);
        for (r, t) in [(0.0, 0.0), (0.3, 1.0), (1.0, 2.5)] {
            let j = m.jacobian(r, t).unwrap();
            assert!((j[0][0] - 1.0).abs() < 1e-14 && j[0][1].abs() < 1e-14);
            assert!(j[1][0].abs() < 1e-14 && (j[1][1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_circle_gives_identity_on_annulus() {
        let m = solve_annulus_extension(&Contour::circle(1.0, 4), 3.0).unwrap();
        for (r, t) in [(1.0, 0.2), (2.0, 1.0), (3.0, 4.0)] {
            let p = m.evaluate(r, t).unwrap();
            assert!((p[0] - r * t.cos()).abs() < 1e-13 && (p[1] - r * t.sin()).abs() < 1e-13);
            let j = m.jacobian(r, t).unwrap();
            assert!((j[0][0] - 1.0).abs() < 1e-12 && (j[1][1] - 1.0).abs() < 1e-12);
            assert!(j[0][1].abs() < 1e-12 && j[1][0].abs() < 1e-12);
        }
    }

    #[test]
    fn zero_contour() {
        let d = solve_disk_extension(&Contour::zero(3));
        assert_eq!(d.evaluate(0.7, 1.0).unwrap(), [0.0, 0.0]);
        let a = solve_annulus_extension(&Contour::zero(3), 3.0).unwrap();
        for t in [0.0, 1.0, 2.0] {
            let p = a.evaluate(3.0, t).unwrap();
            assert!((p[0] - 3.0 * t.cos()).abs() < 1e-14 && (p[1] - 3.0 * t.sin()).abs() < 1e-14);
            let q = a.evaluate(1.0, t).unwrap();
            assert!(q[0].abs() < 1e-14 && q[1].abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_reproduction_and_outer_conditions() {
        let c = Contour::perturbed_circle(&[(2, 0.1)], 8);
        let d = solve_disk_extension(&c);
        let a = solve_annulus_extension(&c, 3.0).unwrap();
        for j in 0..50 {
            let t = 2.0 * PI * j as f64 / 50.0;
            let z = c.point(t);
            for p in [d.evaluate(1.0, t).unwrap(), a.evaluate(1.0, t).unwrap()] {
                assert!((p[0] - z[0]).abs() < 1e-10 && (p[1] - z[1]).abs() < 1e-10);
            }
            let jet = a.jet(3.0, t).unwrap();
            assert!((jet.radial[0] - t.cos()).abs() < 1e-10 && (jet.radial[1] - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let d = solve_disk_extension(&Contour::circle(1.0, 2));
        assert!(matches!(d.evaluate(1.5, 0.0), Err(Error::OutsideDomain { .. })));
        let a = solve_annulus_extension(&Contour::circle(1.0, 2), 2.0).unwrap();
        assert!(a.evaluate(0.5, 0.0).is_err());
        assert!(solve_annulus_extension(&Contour::circle(1.0, 2), 1.0).is_err());
        assert!(solve_annulus_extension(&Contour::circle(2.5, 2), 2.0).is_err());
    }

    #[test]
    fn boundary_jacobian_identity_on_perturbed_circle() {
        let c = Contour::perturbed_circle(&[(2, 0.1)], 16);
        let d = solve_disk_extension(&c);
        for j in 0..100 {
            let t = 2.0 * PI * j as f64 / 100.0 + 0.01;
            let (_, dz) = c.eval(t);
            let expect = dz[0] * dz[0] + dz[1] * dz[1];
            assert!((d.jacobian_det(1.0, t).unwrap() - expect).abs() < 1e-8);
        }
    }
}
