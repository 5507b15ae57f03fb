use std::f64::consts::PI;

use vortex_patch::lagrangian3d::{
    flow_map, picard_solve, picard_step, DerivativeMethod, Differentiator, Grid3, PatchData3D, PeriodicField3D,
    PicardOptions, Preset, Rank, Vec3,
};
use vortex_patch::Error;

fn eulerian(y: Vec3) -> Vec3 {
    [y[1].sin(), y[2].sin(), 0.0]
}

/// Particle path of the steady field by classical RK4 with `steps` substeps per unit time.
fn rk4_path(x: Vec3, t: f64, steps: usize) -> Vec3 {
    let n = ((t * steps as f64).ceil() as usize).max(1);
    let h = t / n as f64;
    let mut y = x;
    let add = |a: Vec3, b: Vec3, s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    for _ in 0..n {
        let k1 = eulerian(y);
        let k2 = eulerian(add(y, k1, h / 2.0));
        let k3 = eulerian(add(y, k2, h / 2.0));
        let k4 = eulerian(add(y, k3, h));
        for c in 0..3 {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    y
}

/// Largest flow-map error when the Lagrangian velocity `u o eta` is sampled on `levels + 1` times.
fn flow_map_error(levels: usize) -> f64 {
    let grid = Grid3::cubic(8, PI).unwrap();
    let horizon = 1.0;
    let times: Vec<f64> = (0..=levels).map(|m| horizon * m as f64 / levels as f64).collect();
    let velocity: Vec<PeriodicField3D> = times
        .iter()
        .map(|&t| PeriodicField3D::from_fn(grid, Rank::Vector, |x, out| out.copy_from_slice(&eulerian(rk4_path(x, t, 400)))))
        .collect();
    let disp = flow_map(&times, &velocity);
    let mut worst = 0.0f64;
    for p in 0..grid.nodes() {
        let x = grid.point(p);
        let y = rk4_path(x, horizon, 400);
        let d = disp[levels].vector_at(p);
        for c in 0..3 {
            worst = worst.max((x[c] + d[c] - y[c]).abs());
        }
    }
    worst
}

#[test]
fn flow_map_matches_particle_paths_at_second_order() {
    let errors: Vec<f64> = [8, 16, 32].into_iter().map(flow_map_error).collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.9..2.2).contains(&order), "errors {errors:?}");
    }
    assert!(errors[2] < 1e-3, "errors {errors:?}");
}

fn ball(grid: usize) -> (PatchData3D, Differentiator) {
    let g = Grid3::cubic(grid, PI).unwrap();
    let diff = Differentiator::new(g, DerivativeMethod::Spectral);
    let band = 3.0 * g.spacing(0);
    let data = PatchData3D::preset(&Preset::Ball { radius: 2.0, strength: 1.0 }, g, band, &diff).unwrap();
    (data, diff)
}

fn options(horizon: f64) -> PicardOptions {
    PicardOptions {
        horizon,
        levels: 4,
        tol: 1e-9,
        ..PicardOptions::default()
    }
}

#[test]
fn horizon_beyond_the_displacement_guard_is_refused() {
    let (data, diff) = ball(16);
    let (_, report) = picard_solve(&data, &diff, options(0.4)).unwrap();
    assert!(report.iterations >= 2);
    match picard_solve(&data, &diff, options(0.8)) {
        Err(Error::JacobianGuard(msg)) => assert!(msg.contains("1/2"), "{msg}"),
        other => panic!("expected the guard to trip, got {:?}", other.map(|(_, r)| r)),
    }
}

#[test]
fn reported_fixed_point_is_stable_under_one_more_step() {
    let (data, diff) = ball(16);
    let opts = options(0.2);
    let (state, report) = picard_solve(&data, &diff, opts).unwrap();
    assert!(report.differences.windows(2).all(|w| w[1] < w[0]), "{:?}", report.differences);
    let (again, _) = picard_step(&data, &state, &diff, opts.solve).unwrap();
    let change = state.distance(&again);
    assert!(change <= opts.tol, "one more step moved v by {change:e}");
}

#[test]
fn solve_is_bitwise_deterministic() {
    let (data, diff) = ball(16);
    let (a, ra) = picard_solve(&data, &diff, options(0.2)).unwrap();
    let (b, rb) = picard_solve(&data, &diff, options(0.2)).unwrap();
    assert_eq!(ra, rb);
    for (u, v) in a.velocity.iter().zip(&b.velocity) {
        assert!(u.data.iter().zip(&v.data).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
