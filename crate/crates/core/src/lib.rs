//! Numerical laboratory for the vortex patch problem.
//!
//! * [`contour2d`] spectral contour dynamics of 2-D patches driven by the Biot-Savart law.
//! * [`flatten`] biharmonic extension maps of a patch boundary into the disk and annulus.
//! * [`twophase`] fitted-mesh finite elements for two-phase elliptic interface problems.
//! * [`lagrangian3d`] the Lagrangian fixed-point iteration for 3-D patches on a periodic box.
//! * [`harness`] scenario files, run reports and series output used by the CLI.

pub mod contour2d;
pub mod error;
pub mod flatten;
pub mod harness;
pub mod lagrangian3d;
pub mod linalg;
pub mod quadrature;
pub mod spectral;
pub mod textio;
pub mod twophase;

pub use error::{Error, Result};
