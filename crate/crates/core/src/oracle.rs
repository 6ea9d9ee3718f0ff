//! Subgradient oracles: exact pass-through and the relative/absolute
//! inexactness models with seeded, deterministic noise.
//!
//! The inexact oracles return a subgradient perturbed inside the stated
//! dual-norm budget. By default the full budget is spent ("worst-magnitude"),
//! which is what the bound-certification runs want; a uniform-magnitude mode
//! exists for average-case plots.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::vecspace::{NormPair, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InexactnessModel {
    Exact,
    Relative { alpha: f64 },
    Absolute { delta: f64 },
}

impl InexactnessModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InexactnessModel::Exact => Ok(()),
            InexactnessModel::Relative { alpha } => {
                if (0.0..1.0).contains(&alpha) {
                    Ok(())
                } else {
                    Err(Error::InvalidAlpha(alpha))
                }
            }
            InexactnessModel::Absolute { delta } => {
                if delta >= 0.0 && delta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidDelta(delta))
                }
            }
        }
    }

    /// Error budget `A` at a point with exact-subgradient dual norm `g_norm`.
    pub fn budget(&self, g_norm: f64) -> f64 {
        match *self {
            InexactnessModel::Exact => 0.0,
            InexactnessModel::Relative { alpha } => alpha * g_norm,
            InexactnessModel::Absolute { delta } => delta,
        }
    }

    /// Cap `B` on the noisy subgradient's dual norm.
    pub fn norm_cap(&self, g_norm: f64) -> f64 {
        match *self {
            InexactnessModel::Exact => g_norm,
            InexactnessModel::Relative { alpha } => (1.0 + alpha) * g_norm,
            InexactnessModel::Absolute { delta } => delta + g_norm,
        }
    }
}

impl FromStr for InexactnessModel {
    type Err = Error;

    /// Grammar: `exact`, `relative:<alpha>`, `absolute:<delta>`.
    fn from_str(s: &str) -> Result<Self> {
        let model = if s == "exact" {
            InexactnessModel::Exact
        } else if let Some(rest) = s.strip_prefix("relative:") {
            let alpha = rest
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad alpha literal: {rest}")))?;
            InexactnessModel::Relative { alpha }
        } else if let Some(rest) = s.strip_prefix("absolute:") {
            let delta = rest
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad delta literal: {rest}")))?;
            InexactnessModel::Absolute { delta }
        } else {
            return Err(Error::InvalidParameter(format!(
                "unknown oracle spec '{s}' (expected exact, relative:<alpha> or absolute:<delta>)"
            )));
        };
        model.validate()?;
        Ok(model)
    }
}

/// Fraction of the error budget actually spent per query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseMagnitude {
    /// Spend the full budget `A` every query.
    Worst,
    /// Scale by an independent uniform draw in `[0, 1]`.
    Uniform,
}

/// How the noise direction is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseMode {
    Random,
    /// Noise directed along `x_star - x`, the most misleading direction for
    /// descent. Requires a problem with a known optimum.
    Adversarial,
}

/// One oracle answer, carrying both the noisy and the exact subgradient so
/// that bound evaluators can use exact-gradient dual norms.
#[derive(Debug, Clone)]
pub struct NoisySubgradient {
    pub g_tilde: Vector,
    pub g_exact: Vector,
    pub error_norm: f64,
    pub bound_a: f64,
    pub bound_b: f64,
}

/// Oracle bound to a problem; owns its RNG stream.
pub struct Oracle<'a> {
    problem: &'a Problem,
    model: InexactnessModel,
    norms: NormPair,
    magnitude: NoiseMagnitude,
    mode: NoiseMode,
    rng: ChaCha8Rng,
}

impl<'a> Oracle<'a> {
    pub fn new(
        problem: &'a Problem,
        model: InexactnessModel,
        norms: NormPair,
        magnitude: NoiseMagnitude,
        mode: NoiseMode,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        model.validate()?;
        if mode == NoiseMode::Adversarial && problem.optimum.is_none() {
            return Err(Error::MissingOptimum { context: "adversarial oracle" });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(Oracle { problem, model, norms, magnitude, mode, rng })
    }

    pub fn model(&self) -> InexactnessModel {
        self.model
    }

    /// Unit-dual-norm random direction: normalized Gaussian under the
    /// Euclidean pair, a random sign pattern under the l1/l-inf pair.
    fn random_direction(&mut self, dim: usize) -> Vector {
        match self.norms {
            NormPair::Euclidean => loop {
                let g: Vec<f64> =
                    (0..dim).map(|_| self.rng.sample::<f64, _>(StandardNormal)).collect();
                let norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.0 {
                    return Vector::new(g.into_iter().map(|a| a / norm).collect())
                        .expect("finite direction");
                }
            },
            NormPair::L1Linf => Vector::new(
                (0..dim).map(|_| if self.rng.random::<bool>() { 1.0 } else { -1.0 }).collect(),
            )
            .expect("finite direction"),
        }
    }

    pub fn query(&mut self, x: &Vector) -> Result<NoisySubgradient> {
        let g_exact = self.problem.subgrad(x);
        let g_norm = self.norms.dual(&g_exact);
        let budget = self.model.budget(g_norm);
        let cap = self.model.norm_cap(g_norm);

        if budget == 0.0 {
            return Ok(NoisySubgradient {
                g_tilde: g_exact.clone(),
                g_exact,
                error_norm: 0.0,
                bound_a: budget,
                bound_b: cap,
            });
        }

        let direction = match self.mode {
            NoiseMode::Random => self.random_direction(x.dim()),
            NoiseMode::Adversarial => {
                let (x_star, _) =
                    self.problem.optimum.as_ref().ok_or(Error::MissingOptimum {
                        context: "adversarial oracle",
                    })?;
                let d = x_star.sub(x)?;
                let d_norm = self.norms.dual(&d);
                if d_norm == 0.0 {
                    self.random_direction(x.dim())
                } else {
                    d.scale(1.0 / d_norm)
                }
            }
        };
        let magnitude = match self.magnitude {
            NoiseMagnitude::Worst => budget,
            NoiseMagnitude::Uniform => budget * self.rng.random::<f64>(),
        };
        let g_tilde = g_exact.axpy(magnitude, &direction)?;
        let error_norm = self.norms.dual(&g_tilde.sub(&g_exact)?);

        // membership in the model class is checked, not assumed
        if error_norm > budget + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "oracle noise exceeded its budget: {error_norm} > {budget}"
            )));
        }
        let noisy_norm = self.norms.dual(&g_tilde);
        if noisy_norm > cap + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "noisy subgradient exceeded its norm cap: {noisy_norm} > {cap}"
            )));
        }
        Ok(NoisySubgradient { g_tilde, g_exact, error_norm, bound_a: budget, bound_b: cap })
    }
}
