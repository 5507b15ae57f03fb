//! Monitoring functionals of a patch boundary: chord-arc constant and Sobolev norms.

use std::f64::consts::PI;

use super::contour::{Contour, Vec2};

/// Outcome of [`chord_arc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordArc {
    pub value: f64,
    pub self_intersecting: bool,
}

/// `min |z(t1) - z(t2)| / d(t1, t2)` over all pairs of a uniform grid of at
/// least `8N` points, with `d` the distance on the circle.
///
/// Coincident samples or crossing polygon edges flag a self-intersection; in
/// the coincident case the value is exactly zero.
pub fn chord_arc(contour: &Contour) -> ChordArc {
    chord_arc_on_grid(contour, contour.monitor_grid())
}

pub fn chord_arc_on_grid(contour: &Contour, m: usize) -> ChordArc {
    use rayon::prelude::*;
    let s = contour.sample(m).expect("monitor grid exceeds 2N+1");
    let pts = &s.points;
    let scale = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let h = 2.0 * PI / m as f64;
    let min = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = f64::INFINITY;
            for j in (i + 1)..m {
                let steps = (j - i).min(m - (j - i));
                let d = steps as f64 * h;
                let chord = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
                best = best.min(chord / d);
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    let coincident = min * h <= 1e-13 * scale;
    if coincident {
        return ChordArc {
            value: 0.0,
            self_intersecting: true,
        };
    }
    ChordArc {
        value: min,
        self_intersecting: polygon_self_intersects(pts),
    }
}

fn cross(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Proper crossings between non-adjacent edges of the closed polygon.
pub fn polygon_self_intersects(pts: &[Vec2]) -> bool {
    use rayon::prelude::*;
    let m = pts.len();
    (0..m).into_par_iter().any(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % m];
        ((i + 2)..m).any(|j| {
            if i == 0 && j == m - 1 {
                return false;
            }
            segments_cross(a, b, pts[j], pts[(j + 1) % m])
        })
    })
}

/// `sqrt(2 pi sum_n (1 + n^2)^s |c_n|^2)`, summed over both components.
pub fn sobolev_norm(contour: &Contour, s: f64) -> f64 {
    assert!(s >= 0.0, "Sobolev order must be non-negative");
    let n = contour.band() as i64;
    let sum: f64 = (-n..=n)
        .map(|k| {
            let c = contour.coeff(k);
            let w = (1.0 + (k * k) as f64).powf(s);
            w * (c[0].norm_sqr() + c[1].norm_sqr())
        })
        .sum();
    (2.0 * PI * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour2d::contour::Contour;

    #[test]
    fn unit_circle_chord_arc_is_two_over_pi() {
        // 2 sin(d/2)/d is minimized at the antipodal pair d = pi
        let c = chord_arc(&Contour::circle(1.0, 16));
        assert!((c.value - 2.0 / PI).abs() < 1e-14);
        assert!(!c.self_intersecting);
    }

    #[test]
    fn chord_arc_scales_with_radius() {
        let c = chord_arc(&Contour::circle(3.0, 16));
        assert!((c.value - 6.0 / PI).abs() < 1e-13);
    }

    #[test]
    fn figure_eight_is_flagged() {
        // (sin 2t, sin t) passes through the origin at t = 0 and t = pi
        let c = Contour::from_fn(4, |t| [(2.0 * t).sin(), t.sin()]);
        let r = chord_arc(&c);
        assert_eq!(r.value, 0.0);
        assert!(r.self_intersecting);
    }

    #[test]
    fn crossing_without_coincident_samples_is_flagged() {
        // limacon with an inner loop: r = 0.5 + cos t
        let c = Contour::from_fn(6, |t| {
            let r = 0.5 + t.cos();
            [r * t.cos(), r * t.sin()]
        });
        let r = chord_arc(&c);
        assert!(r.self_intersecting);
    }

    #[test]
    fn sobolev_norm_reference_values() {
        let c = Contour::circle(1.0, 4);
        assert!((sobolev_norm(&c, 0.0) - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!((sobolev_norm(&c, 1.0) - 2.0 * PI.sqrt()).abs() < 1e-14);
        assert_eq!(sobolev_norm(&Contour::zero(5), 2.5), 0.0);
    }

    #[test]
    fn sobolev_l2_matches_quadrature_of_squared_modulus() {
        let c = Contour::perturbed_circle(&[(3, 0.2)], 8);
        let m = 64;
        let s = c.sample(m).unwrap();
        let quad: f64 = s
            .points
            .iter()
            .map(|p| p[0] * p[0] + p[1] * p[1])
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64;
        assert!((sobolev_norm(&c, 0.0) - quad.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn monitors_are_rotation_invariant() {
        let c = Contour::perturbed_circle(&[(2, 0.1), (5, 0.03)], 10);
        let r = c.rotated(1.234);
        assert!((chord_arc(&c).value - chord_arc(&r).value).abs() < 1e-12);
        assert!((sobolev_norm(&c, 2.5) - sobolev_norm(&r, 2.5)).abs() < 1e-12);
    }
}
