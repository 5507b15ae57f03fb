//! Velocity of a uniform elliptical patch by direct area quadrature of the
//! Biot-Savart integral, independent of the boundary-integral code.

use std::f64::consts::PI;

use crate::contour2d::Vec2;
use crate::quadrature::GaussLegendre;

/// Angular nodes of the trapezoid rule; both integrands are smooth and periodic.
const ANGLES: usize = 2048;
const RADIAL: usize = 64;

/// `u(x) = (omega / 2 pi) int_patch (x - y)^perp / |x - y|^2 dy` for the
/// ellipse `(a cos t, b sin t)`.
///
/// Inside the patch the area element is taken in polar coordinates about
/// `x`, where the Jacobian cancels the kernel singularity. Outside it is
/// taken in elliptic polar coordinates `y = (a rho cos t, b rho sin t)`.
pub fn ellipse_velocity(a: f64, b: f64, omega: f64, x: Vec2) -> Vec2 {
    let inside = (x[0] / a).powi(2) + (x[1] / b).powi(2) < 1.0;
    let gl = GaussLegendre::new(RADIAL);
    let dt = 2.0 * PI / ANGLES as f64;
    let mut u = [0.0; 2];
    for j in 0..ANGLES {
        let t = j as f64 * dt;
        let (s, c) = t.sin_cos();
        if inside {
            // ray x + r (c, s) leaves the ellipse at the positive root
            let qa = c * c / (a * a) + s * s / (b * b);
            let qb = 2.0 * (x[0] * c / (a * a) + x[1] * s / (b * b));
            let qc = (x[0] / a).powi(2) + (x[1] / b).powi(2) - 1.0;
            let reach = (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa);
            // (x - y)^perp / |x - y|^2 r dr = (s, -c) dr, so the radial integral is the reach
            u[0] += dt * reach * s;
            u[1] -= dt * reach * c;
        } else {
            for k in 0..2 {
                u[k] += dt * gl.integrate(0.0, 1.0, |rho| {
                    let y = [a * rho * c, b * rho * s];
                    let d = [x[0] - y[0], x[1] - y[1]];
                    let r2 = d[0] * d[0] + d[1] * d[1];
                    [-d[1], d[0]][k] / r2 * a * b * rho
                });
            }
        }
    }
    [omega / (2.0 * PI) * u[0], omega / (2.0 * PI) * u[1]]
}

/// `count` probes alternating between half and 1.6 times the boundary point
/// at parameter `2 pi j / count + 0.1`.
pub fn ellipse_probes(a: f64, b: f64, count: usize) -> Vec<Vec2> {
    (0..count)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / count as f64 + 0.1;
            let scale = if j % 2 == 0 { 0.5 } else { 1.6 };
            [scale * a * t.cos(), scale * b * t.sin()]
        })
        .collect()
}
