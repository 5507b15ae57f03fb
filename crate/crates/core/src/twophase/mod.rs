//! Fitted-mesh finite elements for two-phase elliptic interface problems.

mod applications;
pub mod export;
mod jump;
mod mesh;
mod problem;
mod rankine;
mod space;
mod study;

pub use applications::{curl_jump, interface_tangent, solve_stream_2d, solve_velocity_2d, stream_velocity};
pub use jump::{interface_gradients, interface_mean, jump_l2_error, measure_interface_jump, JumpQuantity, JumpSample};
pub use mesh::{mesh_from_contour, FeatureSize, InterfaceEdge, InterfaceMesh, OuterBoundary, Phase};
pub use problem::{
    apply, min_eigenvalue, solve_weak, BoundaryField, Coefficient, Component, InterfaceDatum, ScalarField,
    SolveOptions, SolverReport, TensorField, TwoPhaseProblem, TwoPhaseSolution,
};
pub use rankine::{
    lumped_nodal_l2, normal_jump_error, rankine_stream, rankine_study, stream_drop, tangential_jump, RankineRow,
    RankineStudy,
};
pub use space::{element, Degree, Element, Locator, Space};
pub use study::{
    convergence_study, measure_errors, pullback_coefficient, ExactField, ExactGradient, ManufacturedCase, RateTable,
    StudyRow,
};
