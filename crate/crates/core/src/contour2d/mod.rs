//! Spectral contour dynamics of 2-D vortex patches.

pub mod checkpoint;
mod contour;
mod evolve;
mod monitor;
mod series;
pub mod shape;
mod velocity;

pub use contour::{hausdorff_distance, Contour, Samples, Vec2};
pub use evolve::{
    default_gradient_samples, evolve, marker_count, max_stable_dt, step, step_with, EvolveOptions,
    Evolution, StepOptions,
};
pub use monitor::{chord_arc, chord_arc_on_grid, polygon_self_intersects, sobolev_norm, ChordArc};
pub use series::DiagnosticSeries;
pub use velocity::{
    boundary_velocity, log_sine_weights, patch_velocity, velocity_gradient, velocity_gradient_sup,
    BiotSavart, GradientNorm, Mat2, PatchVorticity,
};
