//! Radial members of the biharmonic basis for one angular mode `e^{i n theta}`.
//!
//! Disk (regular at the origin): `r^k, r^{k+2}` with `k = |n|`, and `1, r^2` for `n = 0`.
//! Annulus: `(r/R)^k, (r/R)^{k+2}, r^{-k}, r^{2-k}` for `k >= 2`,
//! `1, r^2, log r, r^2 log r` for `n = 0` and `r, r^3, r^{-1}, r log r` for `|n| = 1`.
//! The growing members are scaled by `R` so all entries stay in `[0, 1]`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use super::{Side, MAX_CONDITION};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radial {
    pub value: f64,
    pub slope: f64,
    /// `value / r`, finite at the origin for the modes that need it.
    pub over_r: f64,
}

fn disk(k: u32, j: usize, r: f64) -> Radial {
    match (k, j) {
        (0, 0) => Radial {
            value: 1.0,
            slope: 0.0,
            over_r: 0.0,
        },
        (0, _) => Radial {
            value: r * r,
            slope: 2.0 * r,
            over_r: r,
        },
        (k, 0) => Radial {
            value: r.powi(k as i32),
            slope: k as f64 * r.powi(k as i32 - 1),
            over_r: r.powi(k as i32 - 1),
        },
        (k, _) => Radial {
            value: r.powi(k as i32 + 2),
            slope: (k + 2) as f64 * r.powi(k as i32 + 1),
            over_r: r.powi(k as i32 + 1),
        },
    }
}

fn annulus(k: u32, j: usize, r: f64, big_r: f64) -> Radial {
    let l = r.ln();
    let (value, slope) = match (k, j) {
        (0, 0) => (1.0, 0.0),
        (0, 1) => (r * r, 2.0 * r),
        (0, 2) => (l, 1.0 / r),
        (0, _) => (r * r * l, 2.0 * r * l + r),
        (1, 0) => (r, 1.0),
        (1, 1) => (r * r * r, 3.0 * r * r),
        (1, 2) => (1.0 / r, -1.0 / (r * r)),
        (1, _) => (r * l, l + 1.0),
        (k, 0) => {
            let v = (r / big_r).powi(k as i32);
            (v, k as f64 * v / r)
        }
        (k, 1) => {
            let v = (r / big_r).powi(k as i32 + 2);
            (v, (k + 2) as f64 * v / r)
        }
        (k, 2) => {
            let v = r.powi(-(k as i32));
            (v, -(k as f64) * v / r)
        }
        (k, _) => {
            let v = r.powi(2 - k as i32);
            (v, (2.0 - k as f64) * v / r)
        }
    };
    Radial {
        value,
        slope,
        over_r: value / r,
    }
}

/// Member `j` of the radial basis for mode `n` on the given side.
pub fn radial_basis(side: Side, n: i64, j: usize, r: f64, outer_radius: f64) -> Radial {
    let k = n.unsigned_abs() as u32;
    match side {
        Side::Disk => disk(k, j, r),
        Side::Annulus => annulus(k, j, r, outer_radius),
    }
}

/// Coefficients of `r^k, r^{k+2}` (or `1, r^2`) matching value `v` and radial
/// derivative `d` at `r = 1`. The system has determinant 2 for every mode.
pub fn disk_mode_coefficients(n: i64, v: Complex64, d: Complex64) -> [Complex64; 2] {
    let k = n.unsigned_abs() as f64;
    let b = (d - k * v) / 2.0;
    [v - b, b]
}

/// Coefficients matching `[value(1), slope(1), value(R), slope(R)]`, with the
/// 2-norm condition number of the basis matrix.
pub fn annulus_mode_coefficients(n: i64, outer_radius: f64, data: [Complex64; 4]) -> Result<([Complex64; 4], f64)> {
    let mut m = Matrix4::<f64>::zeros();
    for j in 0..4 {
        let inner = radial_basis(Side::Annulus, n, j, 1.0, outer_radius);
        let outer = radial_basis(Side::Annulus, n, j, outer_radius, outer_radius);
        m[(0, j)] = inner.value;
        m[(1, j)] = inner.slope;
        m[(2, j)] = outer.value;
        m[(3, j)] = outer.slope;
    }
    let sv = m.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let lu = m.lu();
    let re = Vector4::from_iterator(data.iter().map(|c| c.re));
    let im = Vector4::from_iterator(data.iter().map(|c| c.im));
    let (a, b) = match (lu.solve(&re), lu.solve(&im)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::IllConditioned { condition }),
    };
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for j in 0..4 {
        out[j] = Complex64::new(a[j], b[j]);
    }
    Ok((out, condition))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_channel_mode_two() {
        // a + b = 1, 2a + 4b = 2
        let c = disk_mode_coefficients(2, Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0));
        assert!((c[0] - 1.0).norm() < 1e-15 && c[1].norm() < 1e-15);
    }

    #[test]
    fn annulus_members_are_biharmonic() {
        // Delta of f(r) e^{in theta} is f'' + f'/r - n^2 f / r^2; apply twice by finite differences
        for n in [0i64, 1, 2, 5] {
            for j in 0..4 {
                let f = |r: f64| radial_basis(Side::Annulus, n, j, r, 3.0).value;
                let lap = |r: f64| {
                    let h = 1e-3;
                    let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
                    let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
                    d2 + d1 / r - (n * n) as f64 * f(r) / (r * r)
                };
                let h = 2e-2;
                let r = 2.0;
                let l2 = (lap(r + h) - 2.0 * lap(r) + lap(r - h)) / (h * h)
                    + (lap(r + h) - lap(r - h)) / (2.0 * h) / r
                    - (n * n) as f64 * lap(r) / (r * r);
                assert!(l2.abs() < 1e-2, "n={n} j={j}: {l2}");
            }
        }
    }

    #[test]
    fn slopes_match_finite_differences() {
        for side in [Side::Disk, Side::Annulus] {
            for n in [0i64, 1, 3] {
                for j in 0..side.basis_len() {
                    let r = 1.3f64.min(if side == Side::Disk { 0.7 } else { 1.3 });
                    let h = 1e-6;
                    let fd = (radial_basis(side, n, j, r + h, 2.0).value
                        - radial_basis(side, n, j, r - h, 2.0).value)
                        / (2.0 * h);
                    assert!((fd - radial_basis(side, n, j, r, 2.0).slope).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn nearly_degenerate_annulus_is_reported() {
        let zero = Complex64::new(0.0, 0.0);
        let r = annulus_mode_coefficients(3, 1.0 + 1e-6, [zero; 4]);
        assert!(matches!(r, Err(Error::IllConditioned { .. })));
    }
}
