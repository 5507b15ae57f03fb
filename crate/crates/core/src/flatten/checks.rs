//! Measured properties of the extension maps.

use std::f64::consts::PI;

use super::BiharmonicMap;
use crate::contour2d::Contour;
use crate::error::Result;

fn grid(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |j| 2.0 * PI * j as f64 / m as f64)
}

/// `max |det grad Z(1, theta) - |dz/dtheta|^2|` over `m` uniform angles.
pub fn boundary_jacobian_error(map: &BiharmonicMap, contour: &Contour, m: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in grid(m) {
        let (_, dz) = contour.eval(t);
        let metric = dz[0] * dz[0] + dz[1] * dz[1];
        worst = worst.max((map.jacobian_det(1.0, t)? - metric).abs());
    }
    Ok(worst)
}

/// Depth `eps` such that `det grad Z+ >= alpha/2` on `1 - eps <= r <= 1`,
/// with `alpha = min |dz/dtheta|^2`. Radii are scanned inward in steps of
/// `1/(64 N)` on the contour's monitor grid; zero if the bound already fails at `r = 1`.
pub fn injectivity_depth(disk: &BiharmonicMap, contour: &Contour) -> Result<f64> {
    let alpha = contour.min_metric().powi(2);
    let m = contour.monitor_grid();
    let dr = 1.0 / (64.0 * contour.band().max(4) as f64);
    let mut depth = 0.0;
    let mut r = 1.0;
    while r >= 0.0 {
        for t in grid(m) {
            if disk.jacobian_det(r, t)? < 0.5 * alpha {
                return Ok(depth);
            }
        }
        depth = 1.0 - r;
        r -= dr;
    }
    Ok(1.0)
}

/// Whether every `Z+(1 - eps, theta)` sample lies inside the contour (winding number 1).
pub fn maps_inside(disk: &BiharmonicMap, contour: &Contour, eps: f64, m: usize) -> Result<bool> {
    let c = contour.canonical();
    for t in grid(m) {
        if c.winding_number(disk.evaluate(1.0 - eps, t)?) != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest mismatch in value and in radial derivative between the disk and
/// annulus maps on the unit circle.
pub fn interface_mismatch(disk: &BiharmonicMap, annulus: &BiharmonicMap, m: usize) -> Result<(f64, f64)> {
    let mut value = 0.0f64;
    let mut slope = 0.0f64;
    for t in grid(m) {
        let a = disk.jet(1.0, t)?;
        let b = annulus.jet(1.0, t)?;
        for c in 0..2 {
            value = value.max((a.value[c] - b.value[c]).abs());
            slope = slope.max((a.radial[c] - b.radial[c]).abs());
        }
    }
    Ok((value, slope))
}

/// Second-order polar finite-difference bilaplacian of the map at `(r, theta)`
/// with radial and angular step `h`; largest component magnitude.
pub fn biharmonic_residual(map: &BiharmonicMap, r: f64, theta: f64, h: f64) -> Result<f64> {
    let lap = |r: f64, t: f64, c: usize| -> Result<f64> {
        let f = |r: f64, t: f64| map.evaluate(r, t).map(|v| v[c]);
        let f0 = f(r, t)?;
        let frr = (f(r + h, t)? - 2.0 * f0 + f(r - h, t)?) / (h * h);
        let fr = (f(r + h, t)? - f(r - h, t)?) / (2.0 * h);
        let ftt = (f(r, t + h)? - 2.0 * f0 + f(r, t - h)?) / (h * h);
        Ok(frr + fr / r + ftt / (r * r))
    };
    let mut worst = 0.0f64;
    for c in 0..2 {
        let l0 = lap(r, theta, c)?;
        let lrr = (lap(r + h, theta, c)? - 2.0 * l0 + lap(r - h, theta, c)?) / (h * h);
        let lr = (lap(r + h, theta, c)? - lap(r - h, theta, c)?) / (2.0 * h);
        let ltt = (lap(r, theta + h, c)? - 2.0 * l0 + lap(r, theta - h, c)?) / (h * h);
        worst = worst.max((lrr + lr / r + ltt / (r * r)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::{solve_annulus_extension, solve_disk_extension};

    #[test]
    fn perturbed_circle_checks() {
        let c = Contour::perturbed_circle(&[(2, 0.1), (5, 0.02)], 16);
        let d = solve_disk_extension(&c);
        let a = solve_annulus_extension(&c, 3.0).unwrap();
        assert!(boundary_jacobian_error(&d, &c, 100).unwrap() < 1e-8);
        let (v, s) = interface_mismatch(&d, &a, 64).unwrap();
        assert!(v < 1e-10 && s < 1e-10);
        let eps = injectivity_depth(&d, &c).unwrap();
        assert!(eps > 0.0);
        assert!(maps_inside(&d, &c, eps, 64).unwrap());
    }

    #[test]
    fn bilaplacian_residual_is_second_order() {
        let c = Contour::perturbed_circle(&[(2, 0.1)], 8);
        let d = solve_disk_extension(&c);
        let e: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| biharmonic_residual(&d, 0.6, 1.0, h).unwrap())
            .collect();
        let order = (e[1] / e[2]).log2();
        assert!((order - 2.0).abs() < 0.2, "{e:?}");
    }
}
