use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample grid of {m} points aliases a band limit of {band}: need at least {needed}")]
    Aliasing { m: usize, band: usize, needed: usize },

    #[error("contour is degenerate: chord-arc constant {chord_arc:e} (self-intersection suspected)")]
    Degenerate { chord_arc: f64 },

    #[error("near-singular quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("step rejected: {0}")]
    StepRejected(String),

    #[error("linear system is nearly singular (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("point outside the map domain: r = {r}, allowed [{lo}, {hi}]")]
    OutsideDomain { r: f64, lo: f64, hi: f64 },

    #[error("meshing failed: {0}")]
    Mesh(String),

    #[error("coefficient is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("jacobian guard violated: {0}")]
    JacobianGuard(String),

    #[error("fixed-point iteration is not contracting: factors {factors:?}")]
    NonContraction { factors: Vec<f64> },

    #[error("orientation check failed: {0}")]
    Orientation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
