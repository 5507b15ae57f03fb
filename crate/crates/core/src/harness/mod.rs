//! Scenario files, dispatch to the numerical modules, run reports and
//! plot-ready series output.
//!
//! A scenario names its target module, the module parameters and a table of
//! thresholds `metric = { min = .., max = .. }`. [`run`] validates it, runs
//! it and checks every measured metric that has a threshold.

pub mod emit;
pub mod oracle;
mod report;
mod run;
mod scenario;

pub use emit::{compare_with_golden, emit_series, series_csv, series_file_stem, write_run};
pub use report::{MetricResult, RunReport};
pub use run::{run, run_file, Artifact, RunOutput, ROUGH_FAMILY};
pub use scenario::{
    apply_overrides, line_column, ContourSpec, EllipticCase, FamilyParams, FlattenParams, Module, RefinementParams,
    Scenario, Simulate2dParams, Threshold, TwophaseParams,
};
