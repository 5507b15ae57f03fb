use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral;

pub type Vec2 = [f64; 2];

const REALNESS_TOL: f64 = 1e-9;

/// Band-limited Fourier parameterization `z(theta) = sum_{|n| <= N} c_n e^{i n theta}`
/// of a closed planar curve, one complex coefficient per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    band: usize,
    /// `coeffs[n + N] = [x_hat_n, y_hat_n]`
    coeffs: Vec<[Complex64; 2]>,
    pub time: f64,
}

/// Points and spectral tangents on the uniform grid `theta_j = 2 pi j / m`.
#[derive(Debug, Clone)]
pub struct Samples {
    pub points: Vec<Vec2>,
    pub tangents: Vec<Vec2>,
}

impl Contour {
    /// Build from coefficients for `n = -N..=N`. Conjugate symmetry is
    /// enforced by averaging; a violation beyond round-off is an error.
    pub fn new(band: usize, coeffs: Vec<[Complex64; 2]>, time: f64) -> Result<Self> {
        if band == 0 {
            return Err(Error::InvalidInput("band limit must be positive".into()));
        }
        if coeffs.len() != 2 * band + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for band limit {band}, got {}",
                2 * band + 1,
                coeffs.len()
            )));
        }
        let scale = coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(1.0);
        let mut sym = coeffs.clone();
        for n in 0..=band {
            for c in 0..2 {
                let a = coeffs[band + n][c];
                let b = coeffs[band - n][c].conj();
                if (a - b).norm() > REALNESS_TOL * scale {
                    return Err(Error::InvalidInput(format!(
                        "coefficients violate conjugate symmetry at n = {n}"
                    )));
                }
                let avg = 0.5 * (a + b);
                sym[band + n][c] = avg;
                sym[band - n][c] = avg.conj();
            }
        }
        for c in 0..2 {
            sym[band][c] = Complex64::new(sym[band][c].re, 0.0);
        }
        Ok(Self {
            band,
            coeffs: sym,
            time,
        })
    }

    pub fn zero(band: usize) -> Self {
        Self {
            band,
            coeffs: vec![[Complex64::new(0.0, 0.0); 2]; 2 * band + 1],
            time: 0.0,
        }
    }

    /// Fit the band-`N` trigonometric interpolant to samples on the uniform grid.
    pub fn from_samples(points: &[Vec2], band: usize) -> Result<Self> {
        let m = points.len();
        if m < 2 * band + 1 {
            return Err(Error::Aliasing {
                m,
                band,
                needed: 2 * band + 1,
            });
        }
        let mut out = Self::zero(band);
        for c in 0..2 {
            let mut buf: Vec<Complex64> = points.iter().map(|p| Complex64::new(p[c], 0.0)).collect();
            spectral::forward(&mut buf);
            for n in -(band as i64)..=band as i64 {
                out.coeffs[(n + band as i64) as usize][c] =
                    buf[spectral::index_of(n, m)] / m as f64;
            }
        }
        // exact conjugate symmetry for real input
        for n in 1..=band {
            for c in 0..2 {
                let a = out.coeffs[band + n][c];
                out.coeffs[band - n][c] = a.conj();
            }
        }
        for c in 0..2 {
            out.coeffs[band][c].im = 0.0;
        }
        Ok(out)
    }

    /// Sample an arbitrary closed curve `f(theta)` and fit band `N`.
    pub fn from_fn<F: Fn(f64) -> Vec2>(band: usize, f: F) -> Self {
        let m = (8 * band).max(64);
        let pts: Vec<Vec2> = (0..m)
            .map(|j| f(2.0 * PI * j as f64 / m as f64))
            .collect();
        Self::from_samples(&pts, band).expect("oversampled fit cannot alias")
    }

    pub fn circle(radius: f64, band: usize) -> Self {
        Self::ellipse(radius, radius, band)
    }

    /// Ellipse `(a cos theta, b sin theta)`, counterclockwise.
    pub fn ellipse(a: f64, b: f64, band: usize) -> Self {
        let mut c = Self::zero(band.max(1));
        let n = c.band;
        c.coeffs[n + 1] = [Complex64::new(a / 2.0, 0.0), Complex64::new(0.0, -b / 2.0)];
        c.coeffs[n - 1] = [Complex64::new(a / 2.0, 0.0), Complex64::new(0.0, b / 2.0)];
        c
    }

    /// Radial perturbation `r(theta) = 1 + sum_k amp_k cos(n_k theta)` of the unit circle.
    pub fn perturbed_circle(amplitudes: &[(usize, f64)], band: usize) -> Self {
        let amps = amplitudes.to_vec();
        Self::from_fn(band, move |t| {
            let r = 1.0 + amps.iter().map(|&(n, a)| a * (n as f64 * t).cos()).sum::<f64>();
            [r * t.cos(), r * t.sin()]
        })
    }

    pub fn band(&self) -> usize {
        self.band
    }

    /// Coefficient pair for wavenumber `n` (zero outside the band).
    pub fn coeff(&self, n: i64) -> [Complex64; 2] {
        if n.unsigned_abs() as usize > self.band {
            [Complex64::new(0.0, 0.0); 2]
        } else {
            self.coeffs[(n + self.band as i64) as usize]
        }
    }

    pub fn coeffs(&self) -> &[[Complex64; 2]] {
        &self.coeffs
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Direct synthesis of position and tangent at an arbitrary parameter.
    pub fn eval(&self, theta: f64) -> (Vec2, Vec2) {
        let n = self.band;
        let mut p = [self.coeffs[n][0].re, self.coeffs[n][1].re];
        let mut d = [0.0, 0.0];
        let step = Complex64::from_polar(1.0, theta);
        let mut e = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            e *= step;
            let kf = k as f64;
            for c in 0..2 {
                // c_k e^{ik} + conj(c_k e^{ik}) = 2 Re(c_k e^{ik})
                let t = self.coeffs[n + k][c] * e;
                p[c] += 2.0 * t.re;
                d[c] += -2.0 * kf * t.im;
            }
        }
        (p, d)
    }

    pub fn point(&self, theta: f64) -> Vec2 {
        self.eval(theta).0
    }

    /// Exact synthesis on `m >= 2N+1` uniform points.
    pub fn sample(&self, m: usize) -> Result<Samples> {
        let n = self.band;
        if m < 2 * n + 1 {
            return Err(Error::Aliasing {
                m,
                band: n,
                needed: 2 * n + 1,
            });
        }
        let mut pos = [vec![Complex64::new(0.0, 0.0); m], vec![Complex64::new(0.0, 0.0); m]];
        let mut tan = pos.clone();
        for k in -(n as i64)..=n as i64 {
            let idx = spectral::index_of(k, m);
            let c = self.coeff(k);
            for comp in 0..2 {
                pos[comp][idx] += c[comp];
                tan[comp][idx] += c[comp] * Complex64::new(0.0, k as f64);
            }
        }
        for comp in 0..2 {
            spectral::inverse(&mut pos[comp]);
            spectral::inverse(&mut tan[comp]);
        }
        let points = (0..m).map(|j| [pos[0][j].re, pos[1][j].re]).collect();
        let tangents = (0..m).map(|j| [tan[0][j].re, tan[1][j].re]).collect();
        Ok(Samples { points, tangents })
    }

    /// Signed enclosed area, positive for counterclockwise curves.
    pub fn area(&self) -> f64 {
        // the integrand x y' - y x' has band 2N, so 2N+1 points are exact
        let m = 4 * self.band + 2;
        let s = self.sample(m).expect("m exceeds 2N+1");
        let sum: f64 = s
            .points
            .iter()
            .zip(&s.tangents)
            .map(|(p, t)| p[0] * t[1] - p[1] * t[0])
            .sum();
        0.5 * sum * 2.0 * PI / m as f64
    }

    pub fn centroid(&self) -> Vec2 {
        let m = 6 * self.band + 2;
        let s = self.sample(m).expect("m exceeds 2N+1");
        let a = self.area();
        let mut c = [0.0, 0.0];
        // (1/A) integral x dA = (1/2A) closed integral x^2 dy, similarly for y
        for (p, t) in s.points.iter().zip(&s.tangents) {
            c[0] += 0.5 * p[0] * p[0] * t[1];
            c[1] -= 0.5 * p[1] * p[1] * t[0];
        }
        let w = 2.0 * PI / m as f64 / a;
        [c[0] * w, c[1] * w]
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.area() >= 0.0
    }

    /// Same curve traversed in the opposite direction (`theta -> -theta`).
    pub fn reversed(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            band: self.band,
            coeffs,
            time: self.time,
        }
    }

    /// Counterclockwise version of this contour; clockwise input is re-oriented with a notice.
    pub fn canonical(&self) -> Self {
        if self.is_counterclockwise() {
            self.clone()
        } else {
            log::info!("clockwise contour re-oriented to counterclockwise");
            self.reversed()
        }
    }

    /// Rigid rotation of the curve by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let coeffs = self
            .coeffs
            .iter()
            .map(|z| [z[0] * c - z[1] * s, z[0] * s + z[1] * c])
            .collect();
        Self {
            band: self.band,
            coeffs,
            time: self.time,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|z| [z[0] * factor, z[1] * factor])
            .collect();
        Self {
            band: self.band,
            coeffs,
            time: self.time,
        }
    }

    pub fn translated(&self, offset: Vec2) -> Self {
        let mut out = self.clone();
        let n = self.band;
        out.coeffs[n][0] += offset[0];
        out.coeffs[n][1] += offset[1];
        out
    }

    /// Copy with band limit changed (zero padding or truncation).
    pub fn with_band(&self, band: usize) -> Self {
        let mut out = Self::zero(band);
        out.time = self.time;
        for k in -(band.min(self.band) as i64)..=band.min(self.band) as i64 {
            out.coeffs[(k + band as i64) as usize] = self.coeff(k);
        }
        out
    }

    /// Default dense grid used by the monitoring functionals: at least `8N` points.
    pub fn monitor_grid(&self) -> usize {
        let m = (8 * self.band).max(64);
        m + m % 2
    }

    /// `min |dz/dtheta|` over the monitor grid.
    pub fn min_metric(&self) -> f64 {
        let s = self.sample(self.monitor_grid()).expect("grid exceeds 2N+1");
        s.tangents
            .iter()
            .map(|t| t[0].hypot(t[1]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_radius(&self) -> f64 {
        let s = self.sample(self.monitor_grid()).expect("grid exceeds 2N+1");
        s.points
            .iter()
            .map(|p| p[0].hypot(p[1]))
            .fold(0.0, f64::max)
    }

    /// Parameter of the point of the curve closest to `p`, refined by Newton's method.
    pub fn closest_parameter(&self, p: Vec2) -> f64 {
        let m = self.monitor_grid();
        let s = self.sample(m).expect("grid exceeds 2N+1");
        let (j, _) = s
            .points
            .iter()
            .enumerate()
            .map(|(j, q)| (j, (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let mut t = 2.0 * PI * j as f64 / m as f64;
        let h = 2.0 * PI / m as f64;
        for _ in 0..30 {
            let (z, dz) = self.eval(t);
            let d2 = self.second_derivative(t);
            let r = [z[0] - p[0], z[1] - p[1]];
            let g = r[0] * dz[0] + r[1] * dz[1];
            let gp = dz[0] * dz[0] + dz[1] * dz[1] + r[0] * d2[0] + r[1] * d2[1];
            if gp <= 0.0 {
                break;
            }
            let dt = (g / gp).clamp(-h, h);
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        t.rem_euclid(2.0 * PI)
    }

    pub fn second_derivative(&self, theta: f64) -> Vec2 {
        let n = self.band;
        let mut d = [0.0, 0.0];
        let step = Complex64::from_polar(1.0, theta);
        let mut e = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            e *= step;
            let kf = (k * k) as f64;
            for c in 0..2 {
                d[c] -= 2.0 * kf * (self.coeffs[n + k][c] * e).re;
            }
        }
        d
    }

    /// Distance from `p` to the curve.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let t = self.closest_parameter(p);
        let q = self.point(t);
        (q[0] - p[0]).hypot(q[1] - p[1])
    }

    /// Winding number of the curve around `p`, computed on a dense polygon.
    pub fn winding_number(&self, p: Vec2) -> i64 {
        let m = self.monitor_grid().max(512);
        let s = self.sample(m).expect("grid exceeds 2N+1");
        let mut total = 0.0;
        for j in 0..m {
            let a = s.points[j];
            let b = s.points[(j + 1) % m];
            let ang_a = (a[1] - p[1]).atan2(a[0] - p[0]);
            let ang_b = (b[1] - p[1]).atan2(b[0] - p[0]);
            let mut d = ang_b - ang_a;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            total += d;
        }
        (total / (2.0 * PI)).round() as i64
    }
}

/// Symmetric Hausdorff distance between two curves, with each sample projected
/// onto the other curve by Newton's method.
pub fn hausdorff_distance(a: &Contour, b: &Contour) -> f64 {
    let one_sided = |from: &Contour, to: &Contour| {
        let s = from.sample(from.monitor_grid()).expect("grid exceeds 2N+1");
        s.points
            .iter()
            .map(|&p| to.distance_to(p))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}
