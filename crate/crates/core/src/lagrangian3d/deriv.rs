//! Periodic differentiation along grid lines and the constant-coefficient
//! inverse Laplacian used as a preconditioner.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid3, PeriodicField3D, Rank};
use crate::linalg::Preconditioner;
use crate::spectral::{plan_forward, plan_inverse, wavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    /// Trigonometric differentiation; the Nyquist mode is dropped.
    #[default]
    Spectral,
    /// Fourth-order central differences.
    FiniteDifference4,
}

#[derive(Debug, Clone, Copy)]
pub struct Differentiator {
    pub grid: Grid3,
    pub method: DerivativeMethod,
}

/// Apply `f` to every grid line along `axis`, in parallel, returning the new samples.
fn map_lines<T, F>(grid: &Grid3, data: &[T], axis: usize, f: F) -> Vec<T>
where
    T: Copy + Send + Sync,
    F: Fn(&mut [T]) + Sync,
{
    let n = grid.n[axis];
    let stride = grid.stride(axis);
    let outer = grid.nodes() / (n * stride);
    let lines: Vec<Vec<T>> = (0..outer * stride)
        .into_par_iter()
        .map(|l| {
            let base = (l / stride) * n * stride + l % stride;
            let mut line: Vec<T> = (0..n).map(|i| data[base + i * stride]).collect();
            f(&mut line);
            line
        })
        .collect();
    let mut out = data.to_vec();
    for (l, line) in lines.iter().enumerate() {
        let base = (l / stride) * n * stride + l % stride;
        for (i, v) in line.iter().enumerate() {
            out[base + i * stride] = *v;
        }
    }
    out
}

impl Differentiator {
    pub fn new(grid: Grid3, method: DerivativeMethod) -> Self {
        Self { grid, method }
    }

    /// Real multiplier `s` such that the derivative of mode `k` along `axis` is `i s`.
    pub fn symbol(&self, axis: usize, k: usize) -> f64 {
        let n = self.grid.n[axis];
        match self.method {
            DerivativeMethod::Spectral => {
                if n % 2 == 0 && k == n / 2 {
                    0.0
                } else {
                    wavenumber(k, n) as f64 * PI / self.grid.ell
                }
            }
            DerivativeMethod::FiniteDifference4 => {
                let h = self.grid.spacing(axis);
                let t = 2.0 * PI * k as f64 / n as f64;
                (8.0 * t.sin() - (2.0 * t).sin()) / (6.0 * h)
            }
        }
    }

    pub fn derivative(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let n = self.grid.n[axis];
        match self.method {
            DerivativeMethod::Spectral => {
                let fwd = plan_forward(n);
                let inv = plan_inverse(n);
                let mult: Vec<f64> = (0..n).map(|k| self.symbol(axis, k) / n as f64).collect();
                map_lines(&self.grid, f, axis, |line: &mut [f64]| {
                    let mut buf: Vec<Complex64> = line.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                    fwd.process(&mut buf);
                    for (c, m) in buf.iter_mut().zip(&mult) {
                        *c = Complex64::new(-c.im * m, c.re * m);
                    }
                    inv.process(&mut buf);
                    for (v, c) in line.iter_mut().zip(&buf) {
                        *v = c.re;
                    }
                })
            }
            DerivativeMethod::FiniteDifference4 => {
                let h = self.grid.spacing(axis);
                map_lines(&self.grid, f, axis, |line: &mut [f64]| {
                    let src = line.to_vec();
                    for i in 0..n {
                        let at = |o: i64| src[(i as i64 + o).rem_euclid(n as i64) as usize];
                        line[i] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
                    }
                })
            }
        }
    }

    /// `G[i][j] = d v_i / d x_j` of a vector field, as a matrix field.
    pub fn gradient(&self, v: &PeriodicField3D) -> PeriodicField3D {
        assert_eq!(v.rank, Rank::Vector);
        let comps: Vec<Vec<f64>> = (0..9).map(|e| self.derivative(v.component(e / 3), e % 3)).collect();
        PeriodicField3D::from_components(self.grid, comps).expect("nine components")
    }

    /// Curl of a vector field.
    pub fn curl(&self, v: &PeriodicField3D) -> PeriodicField3D {
        let g = self.gradient(v);
        let d = |i: usize, j: usize| g.component(3 * i + j);
        let sub = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>();
        let comps = vec![sub(d(2, 1), d(1, 2)), sub(d(0, 2), d(2, 0)), sub(d(1, 0), d(0, 1))];
        PeriodicField3D::from_components(self.grid, comps).expect("three components")
    }

    pub fn divergence(&self, v: &PeriodicField3D) -> Vec<f64> {
        let mut out = self.derivative(v.component(0), 0);
        for a in 1..3 {
            for (o, d) in out.iter_mut().zip(self.derivative(v.component(a), a)) {
                *o += d;
            }
        }
        out
    }

    pub fn inverse_laplacian(&self) -> InverseLaplacian {
        InverseLaplacian::new(*self)
    }
}

/// Solves `-L z = r` for the constant-coefficient operator `L = sum_a D_a D_a`
/// built from the same derivative symbols. Modes on which `L` vanishes (the
/// mean, and Nyquist corners) are set to zero.
pub struct InverseLaplacian {
    grid: Grid3,
    /// Per-axis squared symbols.
    squares: [Vec<f64>; 3],
    floor: f64,
}

impl InverseLaplacian {
    pub fn new(diff: Differentiator) -> Self {
        let squares = [0, 1, 2].map(|a| (0..diff.grid.n[a]).map(|k| diff.symbol(a, k).powi(2)).collect::<Vec<f64>>());
        let smallest = (0..3).map(|a| diff.symbol(a, 1).powi(2)).fold(f64::INFINITY, f64::min);
        Self {
            grid: diff.grid,
            squares,
            floor: 1e-6 * smallest,
        }
    }

    /// Three-dimensional transform of complex samples in place.
    fn transform(&self, buf: &mut Vec<Complex64>, forward: bool) {
        for axis in 0..3 {
            let n = self.grid.n[axis];
            let plan = if forward { plan_forward(n) } else { plan_inverse(n) };
            *buf = map_lines(&self.grid, buf, axis, |line: &mut [Complex64]| plan.process(line));
        }
    }

    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let mut buf: Vec<Complex64> = r.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, true);
        let scale = 1.0 / g.nodes() as f64;
        buf.par_iter_mut().enumerate().for_each(|(p, c)| {
            let k = g.coords(p);
            let s = self.squares[0][k[0]] + self.squares[1][k[1]] + self.squares[2][k[2]];
            *c = if s > self.floor { *c * (scale / s) } else { Complex64::new(0.0, 0.0) };
        });
        self.transform(&mut buf, false);
        buf.iter().map(|c| c.re).collect()
    }
}

impl Preconditioner for InverseLaplacian {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(&self.solve(r));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid3 {
        Grid3::new([16, 12, 20], PI).unwrap()
    }

    #[test]
    fn spectral_derivative_is_exact_for_trig_modes() {
        let g = grid();
        let d = Differentiator::new(g, DerivativeMethod::Spectral);
        let f = PeriodicField3D::from_fn(g, Rank::Scalar, |x, v| v[0] = (2.0 * x[0]).sin() * x[1].cos() + (3.0 * x[2]).cos());
        let dx = d.derivative(f.component(0), 0);
        let dz = d.derivative(f.component(0), 2);
        for p in 0..g.nodes() {
            let x = g.point(p);
            assert!((dx[p] - 2.0 * (2.0 * x[0]).cos() * x[1].cos()).abs() < 1e-12);
            assert!((dz[p] + 3.0 * (3.0 * x[2]).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_differences_converge() {
        let err = |n: usize| {
            let g = Grid3::cubic(n, PI).unwrap();
            let d = Differentiator::new(g, DerivativeMethod::FiniteDifference4);
            let f = PeriodicField3D::from_fn(g, Rank::Scalar, |x, v| v[0] = x[1].sin());
            let dy = d.derivative(f.component(0), 1);
            (0..g.nodes()).map(|p| (dy[p] - g.point(p)[1].cos()).abs()).fold(0.0, f64::max)
        };
        let rate = (err(8) / err(16)).log2();
        assert!(rate > 3.8, "rate {rate}");
    }

    #[test]
    fn inverse_laplacian_inverts_both_methods() {
        let g = grid();
        for method in [DerivativeMethod::Spectral, DerivativeMethod::FiniteDifference4] {
            let d = Differentiator::new(g, method);
            let f = PeriodicField3D::from_fn(g, Rank::Scalar, |x, v| v[0] = x[0].sin() * (2.0 * x[1]).cos() + x[2].cos());
            let mut lap = vec![0.0; g.nodes()];
            for a in 0..3 {
                let dd = d.derivative(&d.derivative(f.component(0), a), a);
                lap.iter_mut().zip(dd).for_each(|(l, v)| *l -= v);
            }
            let back = d.inverse_laplacian().solve(&lap);
            for p in 0..g.nodes() {
                assert!((back[p] - f.data[p]).abs() < 1e-10, "{method:?}");
            }
        }
    }

    #[test]
    fn curl_of_gradient_vanishes_and_div_of_curl_vanishes() {
        let g = grid();
        let d = Differentiator::new(g, DerivativeMethod::Spectral);
        let v = PeriodicField3D::from_fn(g, Rank::Vector, |x, v| {
            v[0] = x[1].sin() * x[2].cos();
            v[1] = (x[0] + x[2]).sin();
            v[2] = (2.0 * x[0]).cos() * x[1].sin();
        });
        let div = d.divergence(&d.curl(&v));
        assert!(div.iter().all(|x| x.abs() < 1e-12));
    }
}
