//! Uniform periodic grids on `[-l, l]^3` and fields sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// `n[0] x n[1] x n[2]` nodes at `x_a = -l + i h_a`, `h_a = 2 l / n[a]`.
/// Node `(i, j, k)` is stored at `(i n[1] + j) n[2] + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub n: [usize; 3],
    pub ell: f64,
}

impl Grid3 {
    pub fn new(n: [usize; 3], ell: f64) -> Result<Self> {
        if n.iter().any(|&m| m < 4) {
            return Err(Error::InvalidInput(format!("grid needs at least 4 nodes per side, got {n:?}")));
        }
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::InvalidInput(format!("box half-length must be positive, got {ell}")));
        }
        Ok(Self { n, ell })
    }

    pub fn cubic(n: usize, ell: f64) -> Result<Self> {
        Self::new([n; 3], ell)
    }

    pub fn nodes(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.ell / self.n[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing(0) * self.spacing(1) * self.spacing(2)
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }

    /// Index with each coordinate wrapped periodically.
    pub fn wrapped(&self, ijk: [i64; 3]) -> usize {
        let w = |v: i64, a: usize| v.rem_euclid(self.n[a] as i64) as usize;
        self.index(w(ijk[0], 0), w(ijk[1], 1), w(ijk[2], 2))
    }

    pub fn coords(&self, node: usize) -> [usize; 3] {
        let k = node % self.n[2];
        let j = (node / self.n[2]) % self.n[1];
        let i = node / (self.n[1] * self.n[2]);
        [i, j, k]
    }

    pub fn point(&self, node: usize) -> Vec3 {
        let c = self.coords(node);
        [0, 1, 2].map(|a| -self.ell + c[a] as f64 * self.spacing(a))
    }

    /// Distance between strides of consecutive nodes along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.n[1] * self.n[2],
            1 => self.n[2],
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank {
    Scalar,
    Vector,
    Matrix,
}

impl Rank {
    pub fn components(self) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => 3,
            Rank::Matrix => 9,
        }
    }

    pub fn from_components(c: usize) -> Option<Self> {
        match c {
            1 => Some(Rank::Scalar),
            3 => Some(Rank::Vector),
            9 => Some(Rank::Matrix),
            _ => None,
        }
    }
}

/// Component-major samples: component `c` occupies
/// `data[c * nodes .. (c + 1) * nodes]`. Matrix entry `(i, j)` is component `3 i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField3D {
    pub grid: Grid3,
    pub rank: Rank,
    pub data: Vec<f64>,
}

impl PeriodicField3D {
    pub fn zeros(grid: Grid3, rank: Rank) -> Self {
        Self {
            grid,
            rank,
            data: vec![0.0; grid.nodes() * rank.components()],
        }
    }

    /// Samples `f` at every node; `f` writes one value per component.
    pub fn from_fn<F: Fn(Vec3, &mut [f64]) + Sync>(grid: Grid3, rank: Rank, f: F) -> Self {
        use rayon::prelude::*;
        let nc = rank.components();
        let rows: Vec<Vec<f64>> = (0..grid.nodes())
            .into_par_iter()
            .map(|p| {
                let mut v = vec![0.0; nc];
                f(grid.point(p), &mut v);
                v
            })
            .collect();
        let mut out = Self::zeros(grid, rank);
        let nodes = grid.nodes();
        for (p, row) in rows.iter().enumerate() {
            for c in 0..nc {
                out.data[c * nodes + p] = row[c];
            }
        }
        out
    }

    pub fn from_components(grid: Grid3, comps: Vec<Vec<f64>>) -> Result<Self> {
        let rank = Rank::from_components(comps.len())
            .ok_or_else(|| Error::InvalidInput(format!("{} components is not a field rank", comps.len())))?;
        if comps.iter().any(|c| c.len() != grid.nodes()) {
            return Err(Error::InvalidInput("component length does not match the grid".into()));
        }
        Ok(Self {
            grid,
            rank,
            data: comps.concat(),
        })
    }

    pub fn components(&self) -> usize {
        self.rank.components()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.nodes();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.nodes();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn at(&self, node: usize, c: usize) -> f64 {
        self.data[c * self.grid.nodes() + node]
    }

    pub fn vector_at(&self, node: usize) -> Vec3 {
        [0, 1, 2].map(|c| self.at(node, c))
    }

    pub fn matrix_at(&self, node: usize) -> Mat3 {
        [0, 1, 2].map(|i| [0, 1, 2].map(|j| self.at(node, 3 * i + j)))
    }

    /// `(cell volume * sum over nodes and components of v^2)^(1/2)`
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * self.data.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid quadrature of each component over the box.
    pub fn integral(&self) -> Vec<f64> {
        let dv = self.grid.cell_volume();
        (0..self.components()).map(|c| dv * self.component(c).iter().sum::<f64>()).collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.grid.nodes() as f64;
        (0..self.components()).map(|c| self.component(c).iter().sum::<f64>() / n).collect()
    }

    pub fn subtract_mean(&mut self) {
        for (c, m) in self.mean().into_iter().enumerate() {
            self.component_mut(c).iter_mut().for_each(|v| *v -= m);
        }
    }

    /// L2 distance to a field of the same shape.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b) * (a - b)).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    /// Periodic tricubic Lagrange interpolation of component `c` at `x`.
    pub fn interpolate(&self, c: usize, x: Vec3) -> f64 {
        let g = &self.grid;
        let data = self.component(c);
        let mut base = [0i64; 3];
        let mut w = [[0.0; 4]; 3];
        for a in 0..3 {
            let s = (x[a] + g.ell) / g.spacing(a);
            let f = s.floor();
            base[a] = f as i64 - 1;
            let t = s - f;
            // nodes at offsets -1, 0, 1, 2 relative to floor
            w[a] = [
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ];
        }
        let mut sum = 0.0;
        for (di, wi) in w[0].iter().enumerate() {
            for (dj, wj) in w[1].iter().enumerate() {
                for (dk, wk) in w[2].iter().enumerate() {
                    let p = g.wrapped([base[0] + di as i64, base[1] + dj as i64, base[2] + dk as i64]);
                    sum += wi * wj * wk * data[p];
                }
            }
        }
        sum
    }
}
