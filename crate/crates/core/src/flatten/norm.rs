//! Closed-form `H^k(D)` norms of disk maps.
//!
//! Every disk mode is a polynomial in `w = x + iy` and its conjugate:
//! `r^k e^{ik theta} = w^k`, `r^{k+2} e^{ik theta} = w^{k+1} conj(w)` (and
//! conjugated for negative modes). Derivatives act as `d/dx = d_w + d_wbar`,
//! `d/dy = i (d_w - d_wbar)`, and monomials integrate over the unit disk as
//! `integral w^p wbar^q conj(w^p' wbar^q') dA = 2 pi delta(p - q, p' - q') / (p + q + p' + q' + 2)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{solve_disk_extension, BiharmonicMap, Side};
use crate::contour2d::{sobolev_norm, Contour};

type Poly = BTreeMap<(u32, u32), Complex64>;

fn add(p: &mut Poly, key: (u32, u32), c: Complex64) {
    if c != Complex64::new(0.0, 0.0) {
        *p.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
}

fn component_poly(map: &BiharmonicMap, comp: usize) -> Poly {
    let mut p = Poly::new();
    let band = map.band() as i64;
    for n in -band..=band {
        let a = &map.mode(n)[comp];
        let k = n.unsigned_abs() as u32;
        if n >= 0 {
            add(&mut p, (k, 0), a[0]);
            add(&mut p, (k + 1, 1), a[1]);
        } else {
            add(&mut p, (0, k), a[0]);
            add(&mut p, (1, k + 1), a[1]);
        }
    }
    p
}

/// `d/dx` (`dir = 0`) or `d/dy` (`dir = 1`).
fn differentiate(p: &Poly, dir: usize) -> Poly {
    let i = Complex64::new(0.0, 1.0);
    let mut out = Poly::new();
    for (&(a, b), &c) in p {
        let (fw, fwb) = if dir == 0 {
            (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
        } else {
            (i, -i)
        };
        if a > 0 {
            add(&mut out, (a - 1, b), c * fw * a as f64);
        }
        if b > 0 {
            add(&mut out, (a, b - 1), c * fwb * b as f64);
        }
    }
    out
}

fn l2_squared(p: &Poly) -> f64 {
    let mut groups: BTreeMap<i64, Vec<((u32, u32), Complex64)>> = BTreeMap::new();
    for (&k, &c) in p {
        groups.entry(k.0 as i64 - k.1 as i64).or_default().push((k, c));
    }
    let mut total = 0.0;
    for terms in groups.values() {
        for &((a, b), c) in terms {
            for &((a2, b2), c2) in terms {
                total += (c * c2.conj()).re * 2.0 * PI / (a + b + a2 + b2 + 2) as f64;
            }
        }
    }
    total
}

/// `(sum_{|alpha| <= k} ||d^alpha Z||^2_{L^2(D)})^{1/2}`, summed over both components.
pub fn disk_sobolev_norm(map: &BiharmonicMap, k: u32) -> f64 {
    assert_eq!(map.side(), Side::Disk, "closed-form norms exist for disk maps only");
    let mut total = 0.0;
    for comp in 0..2 {
        let p = component_poly(map, comp);
        // derivatives indexed by the number of y-derivatives at each order
        let mut level = vec![p];
        total += l2_squared(&level[0]);
        for _ in 1..=k {
            let mut next = Vec::with_capacity(level.len() + 1);
            next.push(differentiate(&level[0], 0));
            for q in &level {
                next.push(differentiate(q, 1));
            }
            for q in &next {
                total += l2_squared(q);
            }
            level = next;
        }
    }
    total.sqrt()
}

/// `||Z+||_{H^k(D)} / ||z||_{H^{k-1/2}}` for each contour.
pub fn sobolev_gain_ratio(family: &[Contour], k: u32) -> Vec<f64> {
    use rayon::prelude::*;
    family
        .par_iter()
        .map(|c| {
            let map = solve_disk_extension(c);
            disk_sobolev_norm(&map, k) / sobolev_norm(c, k as f64 - 0.5)
        })
        .collect()
}

/// Perturbed circles `r = 1 + A sum_{n >= 2} n^{-(k + eps)} cos(n theta + phase_n)`
/// with `eps` decreasing from 1 to 0.1 across the family, so later members are
/// rougher while staying in `H^{k - 1/2}`.
pub fn roughening_family(k: u32, members: usize, band: usize, seed: u64) -> Vec<Contour> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phases: Vec<f64> = (0..=band).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    (0..members)
        .map(|j| {
            let frac = if members > 1 { j as f64 / (members - 1) as f64 } else { 0.0 };
            let eps = 1.0 - 0.9 * frac;
            let decay = k as f64 + eps;
            let amp = 0.1;
            let ph = phases.clone();
            Contour::from_fn(band, move |t| {
                let mut r = 1.0;
                for n in 2..=band {
                    r += amp * (n as f64).powf(-decay) * (n as f64 * t + ph[n]).cos();
                }
                [r * t.cos(), r * t.sin()]
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    #[test]
    fn identity_map_norms() {
        let m = solve_disk_extension(&Contour::circle(1.0, 4));
        // ||x||^2 + ||y||^2 = pi/2, gradients add 2 pi
        assert!((disk_sobolev_norm(&m, 0) - (PI / 2.0).sqrt()).abs() < 1e-14);
        assert!((disk_sobolev_norm(&m, 1) - (2.5 * PI).sqrt()).abs() < 1e-14);
        assert!((disk_sobolev_norm(&m, 3) - (2.5 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn h1_norm_matches_polar_quadrature() {
        let c = Contour::perturbed_circle(&[(2, 0.1), (3, 0.05)], 8);
        let m = solve_disk_extension(&c);
        let gl = GaussLegendre::new(24);
        let nt = 64;
        let mut total = 0.0;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let r = 0.5 * (x + 1.0);
            for j in 0..nt {
                let t = 2.0 * PI * j as f64 / nt as f64;
                let v = m.evaluate(r, t).unwrap();
                let g = m.jacobian(r, t).unwrap();
                let f = v[0] * v[0] + v[1] * v[1] + g.iter().flatten().map(|e| e * e).sum::<f64>();
                total += f * r * 0.5 * w * 2.0 * PI / nt as f64;
            }
        }
        assert!((disk_sobolev_norm(&m, 1) - total.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let c = Contour::perturbed_circle(&[(4, 0.05)], 8);
        let a = sobolev_gain_ratio(&[c.clone(), c.scaled(2.0)], 3);
        assert!((a[0] - a[1]).abs() < 1e-12 * a[0]);
    }

    #[test]
    fn circle_baseline_k2() {
        // H^2 of the identity is 5 pi / 2; the circle's H^{3/2} norm squared is 2 pi 2^{3/2}
        let r = sobolev_gain_ratio(&[Contour::circle(1.0, 4)], 2)[0];
        let expect = (2.5 * PI / (2.0 * PI * 2f64.powf(1.5))).sqrt();
        assert!((r - expect).abs() < 1e-14);
    }

    #[test]
    fn family_is_deterministic_and_simple() {
        let a = roughening_family(3, 3, 32, 7);
        let b = roughening_family(3, 3, 32, 7);
        assert_eq!(a, b);
        for c in &a {
            assert!(crate::contour2d::chord_arc(c).value > 0.1);
        }
    }
}
