//! Prox functions, Bregman divergences and the mirror step.
//!
//! Two setups are shipped, both with closed-form mirror steps: the Euclidean
//! half-squared-norm on a ball (the step reduces to a projected subgradient
//! step) and the negative entropy on the simplex (the step is the
//! multiplicative-weights update).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecspace::{dot, project_ball, FeasibleSet, NormPair, Vector};

/// A prox function bound to its feasible set and norm pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProxSetup {
    /// `psi(x) = 0.5 ||x||_2^2` on the ball of radius `radius`.
    EuclideanBall { radius: f64 },
    /// `psi(x) = sum_i x_i ln x_i` on the probability simplex.
    EntropySimplex { dim: usize },
}

impl ProxSetup {
    pub fn set(&self) -> FeasibleSet {
        match *self {
            ProxSetup::EuclideanBall { radius } => FeasibleSet::Ball { radius },
            ProxSetup::EntropySimplex { dim } => FeasibleSet::Simplex { dim },
        }
    }

    pub fn norms(&self) -> NormPair {
        match self {
            ProxSetup::EuclideanBall { .. } => NormPair::Euclidean,
            ProxSetup::EntropySimplex { .. } => NormPair::L1Linf,
        }
    }

    pub fn psi(&self, x: &Vector) -> Result<f64> {
        match self {
            ProxSetup::EuclideanBall { .. } => {
                let n = x.norm2();
                Ok(0.5 * n * n)
            }
            ProxSetup::EntropySimplex { .. } => {
                // x ln x extends continuously to 0 at x = 0.
                Ok(x.iter().map(|&c| if c > 0.0 { c * c.ln() } else { 0.0 }).sum())
            }
        }
    }

    pub fn grad_psi(&self, x: &Vector) -> Result<Vector> {
        match self {
            ProxSetup::EuclideanBall { .. } => Ok(x.clone()),
            ProxSetup::EntropySimplex { .. } => {
                if x.iter().any(|&c| c <= 0.0) {
                    return Err(Error::ZeroCoordinate);
                }
                Vector::new(x.iter().map(|&c| 1.0 + c.ln()).collect())
            }
        }
    }
}

/// Bregman divergence `V_psi(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>`.
///
/// Closed forms are used: half squared distance for the Euclidean setup and
/// the KL sum for the entropy setup.
pub fn bregman(ps: &ProxSetup, x: &Vector, y: &Vector) -> Result<f64> {
    match ps {
        ProxSetup::EuclideanBall { .. } => {
            let d = x.sub(y)?;
            let n = d.norm2();
            Ok(0.5 * n * n)
        }
        ProxSetup::EntropySimplex { .. } => {
            if y.iter().any(|&c| c <= 0.0) {
                return Err(Error::ZeroCoordinate);
            }
            if x.dim() != y.dim() {
                return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
            }
            // KL(x || y) plus the mass difference; the latter vanishes on the simplex.
            let mut acc = 0.0;
            for (&xi, &yi) in x.iter().zip(y.iter()) {
                if xi > 0.0 {
                    acc += xi * (xi / yi).ln();
                }
                acc += yi - xi;
            }
            Ok(acc)
        }
    }
}

/// One mirror-descent step: the exact minimizer of
/// `<g, x> + V_psi(x, x_k) / gamma` over the feasible set.
pub fn mirror_step(ps: &ProxSetup, x: &Vector, g: &Vector, gamma: f64) -> Result<Vector> {
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveStep(gamma));
    }
    if !ps.set().contains(x) {
        return Err(Error::InfeasiblePoint { context: "mirror_step current iterate" });
    }
    match *ps {
        ProxSetup::EuclideanBall { radius } => project_ball(&x.axpy(-gamma, g)?, radius),
        ProxSetup::EntropySimplex { .. } => {
            if x.dim() != g.dim() {
                return Err(Error::DimensionMismatch { left: x.dim(), right: g.dim() });
            }
            // Multiplicative update with max-shift before exponentiating so
            // large gamma * |g| cannot overflow.
            let shift = g.iter().map(|&gi| -gamma * gi).fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> = x
                .iter()
                .zip(g.iter())
                .map(|(&xi, &gi)| xi * (-gamma * gi - shift).exp())
                .collect();
            let total: f64 = weights.iter().sum();
            Vector::new(weights.into_iter().map(|w| w / total).collect())
        }
    }
}

/// Residual of the three-points identity
/// `<grad psi(b) - grad psi(a), c - a> = V(c,a) + V(a,b) - V(c,b)`.
pub fn check_three_points(ps: &ProxSetup, a: &Vector, b: &Vector, c: &Vector) -> Result<f64> {
    let lhs = dot(&ps.grad_psi(b)?.sub(&ps.grad_psi(a)?)?, &c.sub(a)?)?;
    let rhs = bregman(ps, c, a)? + bregman(ps, a, b)? - bregman(ps, c, b)?;
    Ok((lhs - rhs).abs())
}

/// Checks `|<a,b>| <= ||a||^2 / (2 lambda) + lambda ||b||_*^2 / 2` within
/// relative slack 1e-12.
pub fn check_fenchel_young(ps: &ProxSetup, a: &Vector, b: &Vector, lambda: f64) -> Result<bool> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let norms = ps.norms();
    let pa = norms.primal(a);
    let db = norms.dual(b);
    let lhs = dot(a, b)?.abs();
    let rhs = pa * pa / (2.0 * lambda) + lambda * db * db / 2.0;
    Ok(lhs <= rhs + 1e-12 * (1.0 + rhs))
}
