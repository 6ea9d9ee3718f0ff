//! Closed-form evaluators for the convergence bounds, computed from
//! trajectory aggregates.
//!
//! The trajectory-based bounds replace the global Lipschitz constant with
//! the observed subgradient dual norms; the classical ones are kept for
//! comparison. The inexact bounds are stated in exact-gradient dual norms,
//! which the oracle records alongside the noisy ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::LipschitzMode;
use crate::solver::{Aggregates, RunRecord};

/// Trajectory bound on the function gap: `2 S1 / (mu N (N+1))` with
/// `S1 = sum k/(k+1) ||g_k||_*^2`.
pub fn bound_func_exact(agg: &Aggregates, n: usize, mu: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroIterations);
    }
    let nf = n as f64;
    Ok(2.0 * agg.s1 / (mu * nf * (nf + 1.0)))
}

/// Classical function-gap bound `2 M_f^2 / (mu (N+1))`.
pub fn bound_func_classical(n: usize, mu: f64, m_f: f64) -> Result<f64> {
    if !(m_f > 0.0) {
        return Err(Error::InvalidParameter(format!("M_f must be positive, got {m_f}")));
    }
    Ok(2.0 * m_f * m_f / (mu * (n as f64 + 1.0)))
}

/// Trajectory bound on the distance: `2 sqrt(S1) / (mu sqrt(N(N+1)))`.
pub fn bound_dist_exact(agg: &Aggregates, n: usize, mu: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroIterations);
    }
    let nf = n as f64;
    Ok(2.0 * agg.s1.sqrt() / (mu * (nf * (nf + 1.0)).sqrt()))
}

/// Classical distance bound `2 M_f / (mu sqrt(N+1))`.
pub fn bound_dist_classical(n: usize, mu: f64, m_f: f64) -> Result<f64> {
    if !(m_f > 0.0) {
        return Err(Error::InvalidParameter(format!("M_f must be positive, got {m_f}")));
    }
    Ok(2.0 * m_f / (mu * (n as f64 + 1.0).sqrt()))
}

/// Function-gap bound under relative inexactness:
/// `4(1+a)^2 S2 / (mu N(N+1)) + 2 a^2 S3 / (mu N(N+1))`.
pub fn bound_func_relative(agg: &Aggregates, n: usize, mu: f64, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if n == 0 {
        return Err(Error::ZeroIterations);
    }
    let nn = n as f64 * (n as f64 + 1.0);
    Ok(4.0 * (1.0 + alpha) * (1.0 + alpha) * agg.s2 / (mu * nn)
        + 2.0 * alpha * alpha * agg.s3 / (mu * nn))
}

/// Function-gap bound under absolute inexactness:
/// `4 S4 / (mu N(N+1)) + delta^2 / mu` with `S4 = sum (delta + ||g_k||_*)^2`.
pub fn bound_func_absolute(agg: &Aggregates, n: usize, mu: f64, delta: f64) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::InvalidDelta(delta));
    }
    if n == 0 {
        return Err(Error::ZeroIterations);
    }
    let nn = n as f64 * (n as f64 + 1.0);
    Ok(4.0 * agg.s4 / (mu * nn) + delta * delta / mu)
}

/// Distance bound under relative inexactness:
/// `2 sqrt(2)(1+a) sqrt(S2) / (mu sqrt(N(N+1))) + 2a sqrt(S3) / (mu sqrt(N(N+1)))`.
pub fn bound_dist_relative(agg: &Aggregates, n: usize, mu: f64, alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if n == 0 {
        return Err(Error::ZeroIterations);
    }
    let root = (n as f64 * (n as f64 + 1.0)).sqrt();
    Ok(2.0 * std::f64::consts::SQRT_2 * (1.0 + alpha) * agg.s2.sqrt() / (mu * root)
        + 2.0 * alpha * agg.s3.sqrt() / (mu * root))
}

/// Distance bound under absolute inexactness:
/// `2 sqrt(2) sqrt(S4) / (mu sqrt(N(N+1))) + sqrt(2) delta / mu`.
pub fn bound_dist_absolute(agg: &Aggregates, n: usize, mu: f64, delta: f64) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::InvalidDelta(delta));
    }
    if n == 0 {
        return Err(Error::ZeroIterations);
    }
    let root = (n as f64 * (n as f64 + 1.0)).sqrt();
    Ok(2.0 * std::f64::consts::SQRT_2 * agg.s4.sqrt() / (mu * root)
        + std::f64::consts::SQRT_2 * delta / mu)
}

/// Iterations needed for accuracy `eps` under the classical bound:
/// `ceil(2 M_f^2 / (mu eps) - 1)`, at least 1.
pub fn iterations_for_epsilon(mu: f64, m_f: f64, eps: f64) -> usize {
    let n = (2.0 * m_f * m_f / (mu * eps) - 1.0).ceil();
    if n < 1.0 {
        1
    } else {
        n as usize
    }
}

/// All bound values applicable to a record, evaluated at its final iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub bound_func_new: f64,
    pub bound_func_classical: Option<f64>,
    pub bound_dist_new: f64,
    pub bound_dist_classical: Option<f64>,
    pub bound_func_relative: Option<f64>,
    pub bound_func_absolute: Option<f64>,
    pub bound_dist_relative: Option<f64>,
    pub bound_dist_absolute: Option<f64>,
    pub lipschitz_mode: LipschitzMode,
}

/// Evaluates every applicable bound from the record's final aggregates.
/// `m_f` is the Lipschitz estimate chosen by `mode` (None skips the
/// classical bounds).
pub fn report(
    rec: &RunRecord,
    m_f: Option<f64>,
    mode: LipschitzMode,
) -> Result<BoundReport> {
    report_at(&rec.aggregates, rec.iters, rec.mu, rec.model, m_f, mode)
}

/// As `report`, but from explicit aggregates at iteration `n` (checkpoint
/// re-evaluation and offline certification use this path).
pub fn report_at(
    agg: &Aggregates,
    n: usize,
    mu: f64,
    model: crate::oracle::InexactnessModel,
    m_f: Option<f64>,
    mode: LipschitzMode,
) -> Result<BoundReport> {
    use crate::oracle::InexactnessModel as M;
    let mut rep = BoundReport {
        n,
        bound_func_new: bound_func_exact(agg, n, mu)?,
        bound_func_classical: None,
        bound_dist_new: bound_dist_exact(agg, n, mu)?,
        bound_dist_classical: None,
        bound_func_relative: None,
        bound_func_absolute: None,
        bound_dist_relative: None,
        bound_dist_absolute: None,
        lipschitz_mode: mode,
    };
    if let Some(m_f) = m_f {
        rep.bound_func_classical = Some(bound_func_classical(n, mu, m_f)?);
        rep.bound_dist_classical = Some(bound_dist_classical(n, mu, m_f)?);
    }
    match model {
        M::Exact => {}
        M::Relative { alpha } => {
            rep.bound_func_relative = Some(bound_func_relative(agg, n, mu, alpha)?);
            rep.bound_dist_relative = Some(bound_dist_relative(agg, n, mu, alpha)?);
        }
        M::Absolute { delta } => {
            rep.bound_func_absolute = Some(bound_func_absolute(agg, n, mu, delta)?);
            rep.bound_dist_absolute = Some(bound_dist_absolute(agg, n, mu, delta)?);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg_from_norms(norms: &[f64], delta: f64) -> Aggregates {
        let mut a = Aggregates::default();
        for (i, &g) in norms.iter().enumerate() {
            let k = (i + 1) as f64;
            a.s1 += k / (k + 1.0) * g * g;
            a.s2 += g * g;
            a.s3 += k * g * g;
            a.s4 += (delta + g) * (delta + g);
            a.s5 += k / (k + 1.0) * g * g;
        }
        a
    }

    #[test]
    fn func_exact_values() {
        let a = agg_from_norms(&[2.0], 0.0);
        assert!((bound_func_exact(&a, 1, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let a = agg_from_norms(&[2.0, 2.0], 0.0);
        assert!((bound_func_exact(&a, 2, 1.0).unwrap() - 14.0 / 9.0).abs() < 1e-15);
        let zero = Aggregates::default();
        assert_eq!(bound_func_exact(&zero, 5, 1.0).unwrap(), 0.0);
        assert!(bound_func_exact(&zero, 0, 1.0).is_err());
    }

    #[test]
    fn func_classical_values() {
        assert!((bound_func_classical(2, 1.0, 2.0).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!((bound_func_classical(1, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // trajectory bound beats the classical one on the same history
        let a = agg_from_norms(&[2.0, 2.0], 0.0);
        assert!(
            bound_func_exact(&a, 2, 1.0).unwrap() < bound_func_classical(2, 1.0, 2.0).unwrap()
        );
    }

    #[test]
    fn dist_values() {
        let a = agg_from_norms(&[2.0, 2.0], 0.0);
        let d = bound_dist_exact(&a, 2, 1.0).unwrap();
        assert!((d - 2.0 / 6.0f64.sqrt() * (14.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((d - 1.763834207376394).abs() < 1e-12);
        let dc = bound_dist_classical(2, 1.0, 2.0).unwrap();
        assert!((dc - 2.309401076758503).abs() < 1e-12);
        assert!(d < dc);
    }

    #[test]
    fn func_relative_values() {
        let a = agg_from_norms(&[1.0], 0.0);
        assert!((bound_func_relative(&a, 1, 1.0, 0.5).unwrap() - 4.75).abs() < 1e-15);
        // alpha = 0 reduces to 4 S2 / (mu N (N+1))
        let red = bound_func_relative(&a, 1, 1.0, 0.0).unwrap();
        assert!((red - 4.0 * a.s2 / 2.0).abs() < 1e-15);
        // monotone in alpha
        let mut prev = -1.0;
        for i in 0..10 {
            let alpha = i as f64 * 0.1;
            let b = bound_func_relative(&a, 1, 1.0, alpha).unwrap();
            assert!(b > prev);
            prev = b;
        }
        assert!(bound_func_relative(&a, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn func_absolute_values() {
        let a = agg_from_norms(&[1.0], 1.0);
        assert!((bound_func_absolute(&a, 1, 1.0, 1.0).unwrap() - 9.0).abs() < 1e-15);
        assert!(bound_func_absolute(&a, 1, 1.0, -0.1).is_err());
        // the delta^2/mu floor persists as N grows
        for n in [100usize, 10_000, 1_000_000] {
            let norms = vec![0.0; 1]; // aggregates independent of n here
            let a = agg_from_norms(&norms, 0.5);
            let b = bound_func_absolute(&a, n, 1.0, 0.5).unwrap();
            assert!(b >= 0.25);
        }
    }

    #[test]
    fn dist_inexact_values() {
        let a = agg_from_norms(&[1.0], 0.0);
        assert!((bound_dist_relative(&a, 1, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        let zero = Aggregates::default();
        assert_eq!(bound_dist_relative(&zero, 1, 1.0, 0.3).unwrap(), 0.0);
        let a = agg_from_norms(&[1.0], 0.0);
        assert!((bound_dist_absolute(&a, 1, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        // zero gradients, delta = 1: 2 sqrt2/sqrt2 + sqrt2 = 2 + sqrt2
        let z = agg_from_norms(&[0.0], 1.0);
        let d = bound_dist_absolute(&z, 1, 1.0, 1.0).unwrap();
        assert!((d - (2.0 + std::f64::consts::SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn reduction_consistency_alpha0_delta0() {
        let a = agg_from_norms(&[1.3, 0.7, 2.1, 0.2], 0.0);
        let rel = bound_func_relative(&a, 4, 2.0, 0.0).unwrap();
        let abs = bound_func_absolute(&a, 4, 2.0, 0.0).unwrap();
        assert!((rel - abs).abs() <= 1e-12 * rel.abs());
    }

    #[test]
    fn iteration_complexity() {
        assert_eq!(iterations_for_epsilon(1.0, 1.0, 1.0), 1);
        assert_eq!(iterations_for_epsilon(1.0, 2.0, 0.1), 79);
        // doubling M roughly quadruples the count
        let n1 = iterations_for_epsilon(1.0, 10.0, 1e-3) as f64;
        let n2 = iterations_for_epsilon(1.0, 20.0, 1e-3) as f64;
        assert!((n2 / n1 - 4.0).abs() < 0.01);
    }
}
