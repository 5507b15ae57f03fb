//! Quadrature rules shared by the 2-D solvers.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A triangle rule in barycentric coordinates; weights sum to one.
#[derive(Debug, Clone, Copy)]
pub struct TriangleRule {
    pub points: &'static [[f64; 3]],
    pub weights: &'static [f64],
}

const D4_A: f64 = 0.445_948_490_915_965;
const D4_B: f64 = 0.091_576_213_509_771;

/// Dunavant 6-point rule, exact for degree 4.
pub const TRIANGLE_DEGREE4: TriangleRule = TriangleRule {
    points: &[
        [D4_A, D4_A, 1.0 - 2.0 * D4_A],
        [D4_A, 1.0 - 2.0 * D4_A, D4_A],
        [1.0 - 2.0 * D4_A, D4_A, D4_A],
        [D4_B, D4_B, 1.0 - 2.0 * D4_B],
        [D4_B, 1.0 - 2.0 * D4_B, D4_B],
        [1.0 - 2.0 * D4_B, D4_B, D4_B],
    ],
    weights: &[
        0.223_381_589_678_011,
        0.223_381_589_678_011,
        0.223_381_589_678_011,
        0.109_951_743_655_322,
        0.109_951_743_655_322,
        0.109_951_743_655_322,
    ],
};

const D6_A: f64 = 0.249_286_745_170_910;
const D6_B: f64 = 0.063_089_014_491_502;
const D6_C1: f64 = 0.053_145_049_844_817;
const D6_C2: f64 = 0.310_352_451_033_784;
const D6_C3: f64 = 1.0 - D6_C1 - D6_C2;

/// Dunavant 12-point rule, exact for degree 6. Used for error norms.
pub const TRIANGLE_DEGREE6: TriangleRule = TriangleRule {
    points: &[
        [D6_A, D6_A, 1.0 - 2.0 * D6_A],
        [D6_A, 1.0 - 2.0 * D6_A, D6_A],
        [1.0 - 2.0 * D6_A, D6_A, D6_A],
        [D6_B, D6_B, 1.0 - 2.0 * D6_B],
        [D6_B, 1.0 - 2.0 * D6_B, D6_B],
        [1.0 - 2.0 * D6_B, D6_B, D6_B],
        [D6_C1, D6_C2, D6_C3],
        [D6_C1, D6_C3, D6_C2],
        [D6_C2, D6_C1, D6_C3],
        [D6_C2, D6_C3, D6_C1],
        [D6_C3, D6_C1, D6_C2],
        [D6_C3, D6_C2, D6_C1],
    ],
    weights: &[
        0.116_786_275_726_379,
        0.116_786_275_726_379,
        0.116_786_275_726_379,
        0.050_844_906_370_207,
        0.050_844_906_370_207,
        0.050_844_906_370_207,
        0.082_851_075_618_374,
        0.082_851_075_618_374,
        0.082_851_075_618_374,
        0.082_851_075_618_374,
        0.082_851_075_618_374,
        0.082_851_075_618_374,
    ],
};

/// Three-point Gauss-Legendre rule on [0, 1] (degree 5), used on interface edges.
pub fn edge_rule() -> ([f64; 3], [f64; 3]) {
    let s = (0.6f64).sqrt() / 2.0;
    ([0.5 - s, 0.5, 0.5 + s], [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_order_has_center_node() {
        let gl = GaussLegendre::new(5);
        assert!(gl.nodes[2].abs() < 1e-15);
        assert!((gl.weights[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    fn check_rule(rule: TriangleRule, degree: i32) {
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // monomials x^p y^q on the reference triangle: p! q! / (p+q+2)!, area 1/2
        for p in 0..=degree {
            for q in 0..=(degree - p) {
                let approx: f64 = rule
                    .points
                    .iter()
                    .zip(rule.weights)
                    .map(|(b, w)| w * b[1].powi(p) * b[2].powi(q))
                    .sum::<f64>()
                    * 0.5;
                let exact = fact(p) * fact(q) / fact(p + q + 2);
                assert!((approx - exact).abs() < 1e-12, "p={p} q={q}");
            }
        }
    }

    fn fact(n: i32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn triangle_rules_reach_their_degree() {
        check_rule(TRIANGLE_DEGREE4, 4);
        check_rule(TRIANGLE_DEGREE6, 6);
    }
}
