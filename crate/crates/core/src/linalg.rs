//! Sparse storage and preconditioned conjugate gradients.

use crate::error::{Error, Result};

/// Symmetric operator `y = A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` triplets, summing duplicates. The result
    /// is independent of triplet order up to floating-point summation order of
    /// duplicates, which follows the input order.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut tmp = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            tmp[next[r]] = (c, v);
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            let row = &mut tmp[counts[i]..counts[i + 1]];
            // stable sort keeps duplicate order deterministic
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter()
                    .position(|&j| j == i)
                    .map(|p| v[p])
                    .unwrap_or(0.0)
            })
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        match c.binary_search(&j) {
            Ok(p) => v[p],
            Err(_) => 0.0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        use rayon::prelude::*;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        });
    }
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &CsrMatrix) -> Self {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .map(|d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
            .collect();
        Self { inv_diag }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

/// Zero-fill incomplete Cholesky factor `L` stored row-wise (lower triangle).
pub struct IncompleteCholesky {
    l: CsrMatrix,
    diag: Vec<f64>,
}

impl IncompleteCholesky {
    /// Returns `None` on a non-positive pivot.
    pub fn new(a: &CsrMatrix) -> Option<Self> {
        let n = a.n;
        let mut row_ptr = vec![0usize];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            let (c, v) = a.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if j < i {
                    cols.push(j);
                    vals.push(x);
                }
            }
            row_ptr.push(cols.len());
        }
        let mut l = CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        };
        let a_diag = a.diagonal();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let start = l.row_ptr[i];
            let end = l.row_ptr[i + 1];
            for p in start..end {
                let k = l.cols[p];
                // dot of row i and row k over columns < k
                let mut s = l.vals[p];
                let (kc, kv) = (
                    &l.cols[l.row_ptr[k]..l.row_ptr[k + 1]],
                    &l.vals[l.row_ptr[k]..l.row_ptr[k + 1]],
                );
                let mut a_idx = start;
                let mut b_idx = 0;
                while a_idx < p && b_idx < kc.len() {
                    let ca = l.cols[a_idx];
                    let cb = kc[b_idx];
                    if ca == cb {
                        s -= l.vals[a_idx] * kv[b_idx];
                        a_idx += 1;
                        b_idx += 1;
                    } else if ca < cb {
                        a_idx += 1;
                    } else {
                        b_idx += 1;
                    }
                }
                l.vals[p] = s / diag[k];
            }
            let sq: f64 = l.vals[start..end].iter().map(|x| x * x).sum();
            let pivot = a_diag[i] - sq;
            if !(pivot > 1e-12 * a_diag[i].abs()) {
                return None;
            }
            diag[i] = pivot.sqrt();
        }
        Some(Self { l, diag })
    }
}

impl Preconditioner for IncompleteCholesky {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.l.n;
        for i in 0..n {
            let (c, v) = self.l.row(i);
            let s: f64 = c.iter().zip(v).map(|(&j, &x)| x * z[j]).sum();
            z[i] = (r[i] - s) / self.diag[i];
        }
        for i in (0..n).rev() {
            z[i] /= self.diag[i];
            let zi = z[i];
            let (c, v) = self.l.row(i);
            for (&j, &x) in c.iter().zip(v) {
                z[j] -= x * zi;
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Project right side and iterates onto zero-mean vectors (constant null space).
    pub project_mean: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 20_000,
            project_mean: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CgReport {
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn remove_mean(x: &mut [f64]) {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= m);
}

/// Preconditioned conjugate gradients for `A x = b`, starting from the value in `x`.
/// The relative residual is measured as `|b - A x| / |b|`.
pub fn pcg<A: LinearOperator + ?Sized, P: Preconditioner + ?Sized>(
    a: &A,
    pc: &P,
    b: &[f64],
    x: &mut [f64],
    opts: CgOptions,
) -> Result<CgReport> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let mut rhs = b.to_vec();
    if opts.project_mean {
        remove_mean(&mut rhs);
        remove_mean(x);
    }
    let bnorm = dot(&rhs, &rhs).sqrt();
    let mut report = CgReport::default();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(report);
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(&rhs) {
        *ri = bi - *ri;
    }
    let mut z = vec![0.0; n];
    pc.apply(&r, &mut z);
    if opts.project_mean {
        remove_mean(&mut z);
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut res = dot(&r, &r).sqrt() / bnorm;
    report.history.push(res);
    while res > opts.rel_tol {
        if report.iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: report.iterations,
                residual: res,
                history: report.history,
            });
        }
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "p^T A p = {pap:e} at iteration {}",
                report.iterations
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        pc.apply(&r, &mut z);
        if opts.project_mean {
            remove_mean(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        report.iterations += 1;
        res = dot(&r, &r).sqrt() / bnorm;
        report.history.push(res);
    }
    // recompute the true residual once at the end
    a.apply(x, &mut ap);
    let true_res = ap
        .iter()
        .zip(&rhs)
        .map(|(v, b)| (b - v) * (b - v))
        .sum::<f64>()
        .sqrt()
        / bnorm;
    report.residual = true_res;
    if opts.project_mean {
        remove_mean(x);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, &t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 4.0)]);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), 4.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn pcg_solves_tridiagonal_with_each_preconditioner() {
        let n = 50;
        let a = laplace_1d(n);
        let exact: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; n];
        a.apply(&exact, &mut b);
        let opts = CgOptions::default();
        for pc in [
            Box::new(Identity) as Box<dyn Preconditioner>,
            Box::new(Jacobi::new(&a)),
            Box::new(IncompleteCholesky::new(&a).unwrap()),
        ] {
            let mut x = vec![0.0; n];
            let rep = pcg(&a, pc.as_ref(), &b, &mut x, opts).unwrap();
            assert!(rep.residual < 1e-10);
            for (u, v) in x.iter().zip(&exact) {
                assert!((u - v).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn incomplete_cholesky_is_exact_for_tridiagonal() {
        // no fill-in for a tridiagonal matrix, so one application solves
        let a = laplace_1d(10);
        let ic = IncompleteCholesky::new(&a).unwrap();
        let b: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut z = vec![0.0; 10];
        ic.apply(&b, &mut z);
        let mut az = vec![0.0; 10];
        a.apply(&z, &mut az);
        for (u, v) in az.iter().zip(&b) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_system_is_rejected() {
        let a = CsrMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        let mut x = vec![0.0; 2];
        let err = pcg(&a, &Identity, &[0.0, 1.0], &mut x, CgOptions::default());
        assert!(matches!(err, Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn non_convergence_reports_history() {
        let a = laplace_1d(200);
        let b = vec![1.0; 200];
        let mut x = vec![0.0; 200];
        let opts = CgOptions {
            max_iter: 3,
            ..Default::default()
        };
        match pcg(&a, &Identity, &b, &mut x, opts) {
            Err(Error::NoConvergence { history, .. }) => assert_eq!(history.len(), 4),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
