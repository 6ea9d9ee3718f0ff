//! Lipschitz-free mirror descent for relatively strongly convex non-smooth
//! objectives, with exact and inexact subgradient oracles and runtime
//! evaluators that certify the convergence bounds against observed
//! trajectories.
//!
//! The convergence bounds here are expressed through the subgradient dual
//! norms observed along the run instead of a global Lipschitz constant,
//! which makes them both evaluable at runtime and sharper than the classical
//! `2 M_f^2 / (mu (N+1))`-type estimates they are compared against.

pub mod bounds;
pub mod error;
pub mod oracle;
pub mod problems;
pub mod prox;
pub mod sampling;
pub mod solver;
pub mod vecspace;

pub use error::{Error, Result};
pub use oracle::{InexactnessModel, NoiseMagnitude, NoiseMode, NoisySubgradient, Oracle};
pub use problems::{
    initial_point, load_anchors, make_example1, make_example2,
    validate_relative_strong_convexity, Example1Params, Example2Params, LipschitzMode, Problem,
};
pub use problems::meb::solve_meb;
pub use prox::{bregman, check_fenchel_young, check_three_points, mirror_step, ProxSetup};
pub use solver::{run, update_average, Aggregates, Checkpoint, RunParams, RunRecord, StepKind, StepRule};
pub use vecspace::{dot, project_ball, FeasibleSet, NormPair, Vector};

/// Version string recorded in run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
