//! Parameterization-free shape measures for near-elliptical patches.
//!
//! About the centroid, an ellipse with semi-axes `a`, `b` rotated by `alpha`
//! satisfies `1/r^2 = (1/a^2 + 1/b^2)/2 + (1/a^2 - 1/b^2)/2 cos 2(phi - alpha)`,
//! so the polar spectrum of `1/r^2` has only the modes `0, +-2`. Its phase at
//! mode 2 gives the orientation and the energy elsewhere measures deformation.
//! Unlike the contour's own coefficients, this does not drift when markers
//! slide along the boundary.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::contour::Contour;
use super::series::DiagnosticSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseFit {
    /// Major-axis angle in `[0, pi)`.
    pub angle: f64,
    /// Relative energy of `1/r^2` outside the modes `0, +-2`.
    pub deformation: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
}

/// `c_k = (1/2pi) closed_integral r^-2 e^{-ik phi} dphi` for `k = 0..=kmax`.
pub fn inverse_square_radius_spectrum(contour: &Contour, kmax: usize) -> Vec<Complex64> {
    let g = contour.centroid();
    let m = (16 * contour.band()).max(256);
    let s = contour.sample(m).expect("grid exceeds 2N+1");
    let mut out = vec![Complex64::new(0.0, 0.0); kmax + 1];
    for (p, t) in s.points.iter().zip(&s.tangents) {
        let x = p[0] - g[0];
        let y = p[1] - g[1];
        let r2 = x * x + y * y;
        let dphi = (x * t[1] - y * t[0]) / r2;
        let phi = y.atan2(x);
        let w = dphi / r2 / m as f64;
        for (k, c) in out.iter_mut().enumerate() {
            *c += Complex64::from_polar(w, -(k as f64) * phi);
        }
    }
    out
}

pub fn fit_ellipse(contour: &Contour) -> EllipseFit {
    let kmax = (2 * contour.band()).max(16);
    let c = inverse_square_radius_spectrum(contour, kmax);
    let total: f64 = c[0].norm_sqr() + 2.0 * c[1..].iter().map(|v| v.norm_sqr()).sum::<f64>();
    let outside: f64 = 2.0
        * c.iter()
            .enumerate()
            .filter(|(k, _)| *k != 0 && *k != 2)
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>();
    // c_2 = (1/a^2 - 1/b^2)/4 e^{-2i alpha}, negative real factor when a > b
    let angle = ((PI - c[2].arg()) / 2.0).rem_euclid(PI);
    let mean = c[0].re;
    let half_diff = 2.0 * c[2].norm();
    EllipseFit {
        angle,
        deformation: outside / total,
        semi_major: (1.0 / (mean - half_diff)).sqrt(),
        semi_minor: (1.0 / (mean + half_diff)).sqrt(),
    }
}

/// Orientation history unwrapped modulo `pi`, for rotation-rate fits.
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut offset = 0.0;
    for (i, &a) in angles.iter().enumerate() {
        if i > 0 {
            let prev = angles[i - 1];
            let d = a - prev;
            if d < -PI / 2.0 {
                offset += PI;
            } else if d > PI / 2.0 {
                offset -= PI;
            }
        }
        out.push(a + offset);
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationFit {
    pub rate: f64,
    pub max_deformation: f64,
}

/// Rotation rate and worst deformation along a sequence of contours.
pub fn rotation_fit(snapshots: &[Contour]) -> RotationFit {
    let fits: Vec<EllipseFit> = snapshots.iter().map(fit_ellipse).collect();
    let times: Vec<f64> = snapshots.iter().map(|c| c.time).collect();
    let angles = unwrap_angles(&fits.iter().map(|f| f.angle).collect::<Vec<_>>());
    RotationFit {
        rate: linear_slope(&times, &angles),
        max_deformation: fits.iter().map(|f| f.deformation).fold(0.0, f64::max),
    }
}

/// Appends `angle` and `deformation` series for the given snapshots.
pub fn record_shape(series: &mut DiagnosticSeries, snapshots: &[Contour]) {
    let fits: Vec<EllipseFit> = snapshots.iter().map(fit_ellipse).collect();
    let angles = unwrap_angles(&fits.iter().map(|f| f.angle).collect::<Vec<_>>());
    for ((c, f), a) in snapshots.iter().zip(&fits).zip(angles) {
        series.push(c.time, "angle", a);
        series.push(c.time, "deformation", f.deformation);
    }
}

/// Rotation rate of an isolated elliptical patch, `ab/(a+b)^2 * omega`.
pub fn kirchhoff_rate(a: f64, b: f64, omega: f64) -> f64 {
    a * b / ((a + b) * (a + b)) * omega
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotated_ellipse_is_recovered() {
        for alpha in [0.0, 0.4, 1.3, 2.9] {
            let c = Contour::ellipse(2.0, 1.0, 8).rotated(alpha).translated([0.5, -1.0]);
            let f = fit_ellipse(&c);
            let d = (f.angle - alpha.rem_euclid(PI)).abs();
            assert!(d.min(PI - d) < 1e-12, "alpha {alpha}: {}", f.angle);
            assert!(f.deformation < 1e-26);
            assert!((f.semi_major - 2.0).abs() < 1e-12 && (f.semi_minor - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reparameterized_ellipse_is_still_undeformed() {
        // nonuniform parameter speed along the same ellipse
        let c = Contour::from_fn(64, |t| {
            let s = t + 0.3 * t.sin();
            [2.0 * s.cos(), s.sin()]
        });
        assert!(fit_ellipse(&c).deformation < 1e-20);
    }

    #[test]
    fn perturbed_circle_is_deformed() {
        let c = Contour::perturbed_circle(&[(3, 0.05)], 16);
        assert!(fit_ellipse(&c).deformation > 1e-3);
    }

    #[test]
    fn kirchhoff_two_to_one() {
        assert!((kirchhoff_rate(2.0, 1.0, 1.0) - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn slope_of_unwrapped_rotation() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.5).collect();
        let raw: Vec<f64> = t.iter().map(|t| (0.3 * t).rem_euclid(PI)).collect();
        let un = unwrap_angles(&raw);
        assert!((linear_slope(&t, &un) - 0.3).abs() < 1e-12);
    }
}
