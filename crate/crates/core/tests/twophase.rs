use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use vortex_patch::contour2d::{patch_velocity, Contour, PatchVorticity};
use vortex_patch::linalg::CgOptions;
use vortex_patch::twophase::*;

fn ball(c: &Contour, h: f64) -> InterfaceMesh {
    mesh_from_contour(c, h, OuterBoundary::default_ball(c)).unwrap()
}

#[test]
fn value_jump_is_exactly_zero() {
    let m = ball(&Contour::ellipse(1.2, 0.8, 8), 0.1);
    let s = solve_velocity_2d(&m, PatchVorticity::default(), SolveOptions::default()).unwrap();
    for sample in measure_interface_jump(&s, &m, JumpQuantity::Value) {
        assert_eq!(sample.value, vec![0.0, 0.0]);
    }
}

#[test]
fn rankine_stream_is_radially_symmetric() {
    let c = Contour::circle(1.0, 8);
    let mut spreads = Vec::new();
    for h in [0.1, 0.05] {
        let m = ball(&c, h);
        let s = solve_stream_2d(&m, PatchVorticity::default(), SolveOptions::default()).unwrap();
        let loc = Locator::new(&m);
        let mut worst = 0.0f64;
        for r in [0.5, 1.5, 3.0] {
            let vals: Vec<f64> = (0..64)
                .map(|j| {
                    let t = 2.0 * PI * (j as f64 + 0.5) / 64.0;
                    s.value_at(&m, &loc, [r * t.cos(), r * t.sin()], 0).unwrap()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
            worst = worst.max(var.sqrt());
        }
        assert!(worst <= h * h, "angular spread {worst:e} at h = {h}");
        spreads.push(worst);
    }
    assert!(spreads[1] < spreads[0]);
}

#[test]
fn velocity_matches_biot_savart_at_probes() {
    let c = Contour::ellipse(1.25, 0.8, 8);
    let h = 0.05;
    let m = ball(&c, h);
    let vort = PatchVorticity::default();
    let s = solve_velocity_2d(&m, vort, SolveOptions::default()).unwrap();
    let loc = Locator::new(&m);
    let mut worst = 0.0f64;
    for j in 0..20 {
        let t = 2.0 * PI * j as f64 / 20.0 + 0.1;
        // alternate between the interior and the exterior of the patch
        let scale = if j % 2 == 0 { 0.5 } else { 1.8 };
        let x = [scale * 1.25 * t.cos(), scale * 0.8 * t.sin()];
        let exact = patch_velocity(&c, vort, x).unwrap();
        for comp in 0..2 {
            let v = s.value_at(&m, &loc, x, comp).unwrap();
            worst = worst.max((v - exact[comp]).abs());
        }
    }
    assert!(worst <= 1e-3f64.max(h * h), "max probe error {worst:e}");
}

#[test]
fn energy_error_decreases_under_refinement() {
    let table = convergence_study(&ManufacturedCase::kinked_circle(), &[0.2, 0.1, 0.05], SolveOptions::default()).unwrap();
    for w in table.rows.windows(2) {
        assert!(w[1].energy < w[0].energy, "{:?}", table.rows);
    }
}

/// Root mean square of the tangential difference quotient of the one-sided
/// recovered velocity gradient along the interface.
fn tangential_quotient(m: &InterfaceMesh, s: &TwoPhaseSolution) -> f64 {
    let g: Vec<_> = (0..2).map(|c| interface_gradients(s, m, c)).collect();
    let mut order: Vec<usize> = (0..m.interface.len()).collect();
    order.sort_by(|&a, &b| m.interface[a].params[0].total_cmp(&m.interface[b].params[0]));
    let mut sum = 0.0;
    let mut len = 0.0;
    for w in 0..order.len() {
        let (a, b) = (order[w], order[(w + 1) % order.len()]);
        let (pa, _) = m.interface_frame(&m.interface[a], 0.5);
        let (pb, _) = m.interface_frame(&m.interface[b], 0.5);
        let d = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
        for c in 0..2 {
            for side in 0..2 {
                for k in 0..2 {
                    let q = (g[c][a][side][k] - g[c][b][side][k]) / d;
                    sum += d * q * q;
                }
            }
        }
        len += d;
    }
    (sum / len).sqrt()
}

#[test]
fn tangential_difference_quotients_stay_bounded() {
    let c = Contour::ellipse(1.25, 0.8, 8);
    let q: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            let m = ball(&c, h);
            let s = solve_velocity_2d(&m, PatchVorticity::default(), SolveOptions::default()).unwrap();
            tangential_quotient(&m, &s)
        })
        .collect();
    // a quotient blowing up like 1/h would grow fourfold over this range
    assert!(q[2] <= 2.0 * q[0], "{q:?}");
}

fn smooth_forcing(coeffs: [f64; 4]) -> ScalarField {
    Arc::new(move |x, p| {
        let base = coeffs[0] * (x[0] + 0.3 * x[1]).sin() + coeffs[1] * x[0] * x[1];
        match p {
            Phase::Plus => base + coeffs[2],
            Phase::Minus => base + coeffs[3] * (-x[0] * x[0]).exp(),
        }
    })
}

fn solve_with(m: &InterfaceMesh, forcing: ScalarField) -> Vec<f64> {
    let a = Coefficient::PerPhase([[[2.0, 0.3], [0.3, 1.0]], [[1.0, 0.0], [0.0, 1.5]]]);
    let problem = TwoPhaseProblem::scalar(Component { forcing, ..Default::default() }).with_coefficient(a);
    let opts = SolveOptions {
        cg: CgOptions { rel_tol: 1e-12, ..Default::default() },
        ..Default::default()
    };
    solve_weak(&problem, m, opts).unwrap().values.remove(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]
    #[test]
    fn forcing_to_solution_is_linear(a in prop::array::uniform4(-2.0f64..2.0), b in prop::array::uniform4(-2.0f64..2.0)) {
        let c = Contour::ellipse(1.1, 0.9, 8);
        let m = mesh_from_contour(&c, 0.2, OuterBoundary::Ball { radius: 3.0 }).unwrap();
        let fa = smooth_forcing(a);
        let fb = smooth_forcing(b);
        let (fa2, fb2) = (fa.clone(), fb.clone());
        let sum: ScalarField = Arc::new(move |x, p| fa2(x, p) + fb2(x, p));
        let ua = solve_with(&m, fa);
        let ub = solve_with(&m, fb);
        let us = solve_with(&m, sum);
        let norm = us.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let diff = us.iter().zip(ua.iter().zip(&ub)).map(|(s, (x, y))| (s - x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-9 * norm, "superposition defect {:e} of {:e}", diff, norm);
    }
}
