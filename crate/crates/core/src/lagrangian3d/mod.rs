//! Lagrangian fixed-point scheme for 3-D patches on a periodic box.
//!
//! Given velocities `v` on a time grid, the flow map `eta = x + int v`
//! transports the initial vorticity to `C = grad eta . omega0`, and each
//! level's new velocity solves a coercive variational problem with
//! coefficient `J A A^T`, `A = (grad eta)^-1`, `J = det grad eta`.

pub mod config;
mod data;
mod deriv;
mod diagnostics;
mod grid;
mod kinematics;
mod picard;
pub mod snapshot;
mod solve;

pub use config::Evolve3dConfig;
pub use data::{smooth_cutoff, smoothed_indicator, PatchData3D, Preset, SurfaceMesh};
pub use deriv::{DerivativeMethod, Differentiator, InverseLaplacian};
pub use diagnostics::{euler_diagnostics, level_diagnostics, level_series, LevelDiagnostics};
pub use grid::{Grid3, Mat3, PeriodicField3D, Rank, Vec3};
pub use kinematics::{
    cross, curl_eta, curl_eta_at, flow_map, jacobian_pack, mat_mul, mat_vec, min_eigenvalue, transported_vorticity,
    transpose, JacobianPack,
};
pub use picard::{picard_solve, picard_step, LagrangianState, PicardOptions, PicardReport};
pub use solve::{variational_rhs, variational_solve, VariationalOptions, VariationalReport};
