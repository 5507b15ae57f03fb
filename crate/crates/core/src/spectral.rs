//! Thin wrappers around `rustfft` with a per-thread planner cache.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Unnormalized forward transform: `X_k = sum_j x_j exp(-2 pi i jk/n)`.
pub fn forward(buf: &mut [Complex64]) {
    plan_forward(buf.len()).process(buf);
}

/// Unnormalized inverse transform: `x_j = sum_k X_k exp(2 pi i jk/n)`.
pub fn inverse(buf: &mut [Complex64]) {
    plan_inverse(buf.len()).process(buf);
}

/// Signed wavenumber of FFT index `k` for length `n`. The Nyquist index of an
/// even-length transform maps to `-n/2`.
pub fn wavenumber(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Index of signed wavenumber `w` in a length-`n` transform.
pub fn index_of(w: i64, n: usize) -> usize {
    w.rem_euclid(n as i64) as usize
}

/// Spectral derivative of periodic real samples on a `2 pi` period.
/// The Nyquist mode of even-length input is discarded.
pub fn derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let w = wavenumber(k, n);
        if n % 2 == 0 && k == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, w as f64);
        }
    }
    inverse(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}
