use thiserror::Error;

/// Errors surfaced by the solver, oracles and geometry primitives.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite coordinate encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("step size must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("point lies outside the feasible set ({context})")]
    InfeasiblePoint { context: &'static str },

    #[error("entropy prox requires strictly positive coordinates")]
    ZeroCoordinate,

    #[error("Fenchel-Young parameter lambda must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("relative inexactness requires alpha in [0,1), got {0}")]
    InvalidAlpha(f64),

    #[error("absolute inexactness requires delta >= 0, got {0}")]
    InvalidDelta(f64),

    #[error("problem has no known optimum ({context})")]
    MissingOptimum { context: &'static str },

    #[error("anchor list must be nonempty")]
    EmptyAnchors,

    #[error("iteration index must be >= 1, got {0}")]
    InvalidIteration(usize),

    #[error("iteration count must be >= 1")]
    ZeroIterations,

    #[error("run configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
