//! The mirror-descent engine: step-size schedules, incremental weighted
//! averaging and trajectory recording.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{InexactnessModel, NoiseMagnitude, NoiseMode, Oracle};
use crate::problems::{initial_point, Problem};
use crate::prox::{mirror_step, ProxSetup};
use crate::vecspace::Vector;

/// Step-size schedule. Both decay as `1/(mu (k+1))`; the inexact analysis
/// uses twice the constant of the exact one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    ExactTheorem,
    InexactTheorem,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    pub kind: StepKind,
    pub mu: f64,
}

impl StepRule {
    /// Schedule value at iteration `k >= 1`.
    pub fn step_size(&self, k: usize) -> Result<f64> {
        if k < 1 {
            return Err(Error::InvalidIteration(k));
        }
        let factor = match self.kind {
            StepKind::ExactTheorem => 2.0,
            StepKind::InexactTheorem => 4.0,
        };
        Ok(factor / (self.mu * (k + 1) as f64))
    }

    /// The schedule matched to the oracle model by the theory.
    pub fn matched_to(model: InexactnessModel, mu: f64) -> StepRule {
        let kind = match model {
            InexactnessModel::Exact => StepKind::ExactTheorem,
            _ => StepKind::InexactTheorem,
        };
        StepRule { kind, mu }
    }
}

/// Compensated (Kahan) accumulator; the running sums take up to 1e6 slowly
/// decaying terms.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Running aggregate sums over the trajectory. `g` is the exact subgradient,
/// `g~` the oracle's noisy one, `delta` the absolute-inexactness budget
/// (zero for the other models).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    /// sum of k/(k+1) * ||g||_*^2
    pub s1: f64,
    /// sum of ||g||_*^2
    pub s2: f64,
    /// sum of k * ||g||_*^2
    pub s3: f64,
    /// sum of (delta + ||g||_*)^2
    pub s4: f64,
    /// sum of k/(k+1) * ||g~||_*^2
    pub s5: f64,
}

/// One logged point of the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub k: usize,
    pub f_x: f64,
    pub f_avg: f64,
    pub gap_avg: Option<f64>,
    pub dist_avg: Option<f64>,
    pub grad_dual_norm: f64,
    pub noisy_grad_dual_norm: f64,
    pub aggregates: Aggregates,
}

/// Everything a run produces: checkpoints, final aggregates and the final
/// weighted-average iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub iters: usize,
    pub mu: f64,
    pub model: InexactnessModel,
    pub step_kind: StepKind,
    pub seed: u64,
    pub stream: u64,
    pub log_every: usize,
    pub checkpoints: Vec<Checkpoint>,
    pub aggregates: Aggregates,
    pub x_hat: Vector,
    pub x_final: Vector,
    pub f_x_hat: f64,
    pub gap: Option<f64>,
    pub dist: Option<f64>,
    /// Sampled iterates `(k, x_k)`, one per checkpoint.
    #[serde(skip)]
    pub iterates_logged: Vec<(usize, Vector)>,
}

/// Incremental weighted average with weights `k`:
/// `x_hat_N = ((N-1)/(N+1)) x_hat_{N-1} + (2/(N+1)) x_N`.
pub fn update_average(x_hat_prev: &Vector, x_new: &Vector, n: usize) -> Result<Vector> {
    if n < 1 {
        return Err(Error::InvalidIteration(n));
    }
    if n == 1 {
        return Ok(x_new.clone());
    }
    let np1 = (n + 1) as f64;
    Ok(x_hat_prev.scale((n - 1) as f64 / np1).axpy(2.0 / np1, x_new)?)
}

/// Parameters for a single run.
#[derive(Debug, Clone, Copy)]
pub struct RunParams {
    pub model: InexactnessModel,
    pub rule: StepRule,
    pub iters: usize,
    pub seed: u64,
    pub stream: u64,
    pub log_every: usize,
    pub magnitude: NoiseMagnitude,
    pub mode: NoiseMode,
}

/// Executes mirror descent for `iters` iterations from the canonical initial
/// point, logging a checkpoint every `log_every` iterations (and at the end).
pub fn run(pr: &Problem, ps: &ProxSetup, params: &RunParams) -> Result<RunRecord> {
    if params.iters < 1 {
        return Err(Error::ZeroIterations);
    }
    if params.log_every < 1 {
        return Err(Error::ConfigMismatch("log_every must be >= 1".into()));
    }
    if params.rule.mu != pr.mu {
        return Err(Error::ConfigMismatch(format!(
            "step rule mu {} does not match problem mu {}",
            params.rule.mu, pr.mu
        )));
    }
    if ps.set() != pr.set {
        return Err(Error::ConfigMismatch(
            "prox setup feasible set does not match problem feasible set".into(),
        ));
    }
    params.model.validate()?;

    let norms = ps.norms();
    let delta = match params.model {
        InexactnessModel::Absolute { delta } => delta,
        _ => 0.0,
    };
    let mut oracle = Oracle::new(
        pr,
        params.model,
        norms,
        params.magnitude,
        params.mode,
        params.seed,
        params.stream,
    )?;

    let mut x = initial_point(&pr.set, pr.dim);
    let mut x_hat = x.clone();
    let mut s1 = KahanSum::default();
    let mut s2 = KahanSum::default();
    let mut s3 = KahanSum::default();
    let mut s4 = KahanSum::default();
    let mut s5 = KahanSum::default();
    let mut checkpoints = Vec::new();
    let mut iterates_logged = Vec::new();

    for k in 1..=params.iters {
        let ans = oracle.query(&x)?;
        let gn = norms.dual(&ans.g_exact);
        let ngn = norms.dual(&ans.g_tilde);
        let kf = k as f64;
        let ratio = kf / (kf + 1.0);
        s1.add(ratio * gn * gn);
        s2.add(gn * gn);
        s3.add(kf * gn * gn);
        s4.add((delta + gn) * (delta + gn));
        s5.add(ratio * ngn * ngn);

        x_hat = update_average(&x_hat, &x, k)?;

        if k % params.log_every == 0 || k == params.iters {
            let f_x = pr.eval_f(&x);
            let f_avg = pr.eval_f(&x_hat);
            let (gap_avg, dist_avg) = match &pr.optimum {
                Some((x_star, f_star)) => {
                    (Some(f_avg - f_star), Some(norms.primal(&x_hat.sub(x_star)?)))
                }
                None => (None, None),
            };
            checkpoints.push(Checkpoint {
                k,
                f_x,
                f_avg,
                gap_avg,
                dist_avg,
                grad_dual_norm: gn,
                noisy_grad_dual_norm: ngn,
                aggregates: Aggregates {
                    s1: s1.value(),
                    s2: s2.value(),
                    s3: s3.value(),
                    s4: s4.value(),
                    s5: s5.value(),
                },
            });
            iterates_logged.push((k, x.clone()));
        }

        let gamma = params.rule.step_size(k)?;
        x = mirror_step(ps, &x, &ans.g_tilde, gamma)?;
    }

    let last = checkpoints.last().expect("at least the final checkpoint is logged");
    Ok(RunRecord {
        iters: params.iters,
        mu: pr.mu,
        model: params.model,
        step_kind: params.rule.kind,
        seed: params.seed,
        stream: params.stream,
        log_every: params.log_every,
        f_x_hat: last.f_avg,
        gap: last.gap_avg,
        dist: last.dist_avg,
        aggregates: last.aggregates,
        checkpoints,
        x_hat,
        x_final: x,
        iterates_logged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_example1, Example1Params};
    use crate::vecspace::project_ball;

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn step_size_values() {
        let exact = StepRule { kind: StepKind::ExactTheorem, mu: 2.0 };
        assert_eq!(exact.step_size(3).unwrap(), 0.25);
        let inexact = StepRule { kind: StepKind::InexactTheorem, mu: 2.0 };
        assert_eq!(inexact.step_size(3).unwrap(), 0.5);
        let unit = StepRule { kind: StepKind::ExactTheorem, mu: 1.0 };
        assert_eq!(unit.step_size(1).unwrap(), 1.0);
        assert!(unit.step_size(0).is_err());
    }

    #[test]
    fn average_update_cases() {
        let x1 = v(&[1.0, 0.0]);
        assert_eq!(update_average(&Vector::zeros(2), &x1, 1).unwrap(), x1);
        let x2 = v(&[0.0, 1.0]);
        let h2 = update_average(&x1, &x2, 2).unwrap();
        assert!((h2.as_slice()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((h2.as_slice()[1] - 2.0 / 3.0).abs() < 1e-15);
        // constant sequence stays put
        let c = v(&[0.4, -0.2]);
        let mut h = c.clone();
        for n in 2..=5 {
            h = update_average(&h, &c, n).unwrap();
        }
        for (a, b) in h.iter().zip(c.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn average_matches_direct_weighted_sum() {
        let xs: Vec<Vector> =
            (1..=20).map(|k| v(&[(k as f64).sin(), (k as f64).cos()])).collect();
        let mut h = Vector::zeros(2);
        for (i, x) in xs.iter().enumerate() {
            h = update_average(&h, x, i + 1).unwrap();
        }
        let total: f64 = (1..=20).map(|k| k as f64).sum();
        let mut direct = Vector::zeros(2);
        for (i, x) in xs.iter().enumerate() {
            direct = direct.axpy((i + 1) as f64 / total, x).unwrap();
        }
        for (a, b) in h.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    fn params(model: InexactnessModel, rule: StepRule, iters: usize, seed: u64) -> RunParams {
        RunParams {
            model,
            rule,
            iters,
            seed,
            stream: 0,
            log_every: 10,
            magnitude: NoiseMagnitude::Worst,
            mode: NoiseMode::Random,
        }
    }

    #[test]
    fn single_step_unrolls_to_projection() {
        let pr = make_example1(&Example1Params { n: 2, radius: 1.0, gamma_coef: 0.5 }).unwrap();
        let ps = ProxSetup::EuclideanBall { radius: 1.0 };
        let rule = StepRule { kind: StepKind::ExactTheorem, mu: pr.mu };
        let rec = run(&pr, &ps, &params(InexactnessModel::Exact, rule, 1, 7)).unwrap();
        let x1 = initial_point(&pr.set, 2);
        let expected =
            project_ball(&x1.axpy(-rule.step_size(1).unwrap(), &pr.subgrad(&x1)).unwrap(), 1.0)
                .unwrap();
        assert_eq!(rec.x_final, expected);
    }

    #[test]
    fn config_mismatch_is_rejected_upfront() {
        let pr = make_example1(&Example1Params { n: 2, radius: 1.0, gamma_coef: 0.5 }).unwrap();
        let ps = ProxSetup::EuclideanBall { radius: 1.0 };
        let bad_mu = StepRule { kind: StepKind::ExactTheorem, mu: pr.mu + 1.0 };
        assert!(run(&pr, &ps, &params(InexactnessModel::Exact, bad_mu, 5, 7)).is_err());
        let bad_set = ProxSetup::EuclideanBall { radius: 2.0 };
        let rule = StepRule { kind: StepKind::ExactTheorem, mu: pr.mu };
        assert!(run(&pr, &bad_set, &params(InexactnessModel::Exact, rule, 5, 7)).is_err());
    }

    #[test]
    fn feasibility_along_trajectory() {
        let pr = make_example1(&Example1Params { n: 3, radius: 1.0, gamma_coef: 0.5 }).unwrap();
        let ps = ProxSetup::EuclideanBall { radius: 1.0 };
        let rule = StepRule { kind: StepKind::InexactTheorem, mu: pr.mu };
        let rec =
            run(&pr, &ps, &params(InexactnessModel::Relative { alpha: 0.5 }, rule, 200, 3))
                .unwrap();
        for (_, x) in &rec.iterates_logged {
            assert!(pr.set.contains(x));
        }
        assert!(pr.set.contains(&rec.x_hat));
    }

    #[test]
    fn identical_seed_identical_record() {
        let pr = make_example1(&Example1Params { n: 4, radius: 1.0, gamma_coef: 0.5 }).unwrap();
        let ps = ProxSetup::EuclideanBall { radius: 1.0 };
        let rule = StepRule { kind: StepKind::InexactTheorem, mu: pr.mu };
        let p = params(InexactnessModel::Absolute { delta: 0.1 }, rule, 100, 9);
        let a = run(&pr, &ps, &p).unwrap();
        let b = run(&pr, &ps, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_noise_reduces_to_exact_bitwise() {
        let pr = make_example1(&Example1Params { n: 4, radius: 1.0, gamma_coef: 0.5 }).unwrap();
        let ps = ProxSetup::EuclideanBall { radius: 1.0 };
        let rule = StepRule { kind: StepKind::ExactTheorem, mu: pr.mu };
        let exact = run(&pr, &ps, &params(InexactnessModel::Exact, rule, 100, 9)).unwrap();
        let rel0 =
            run(&pr, &ps, &params(InexactnessModel::Relative { alpha: 0.0 }, rule, 100, 9))
                .unwrap();
        let abs0 =
            run(&pr, &ps, &params(InexactnessModel::Absolute { delta: 0.0 }, rule, 100, 9))
                .unwrap();
        assert_eq!(exact.x_hat, rel0.x_hat);
        assert_eq!(exact.x_final, rel0.x_final);
        assert_eq!(exact.x_hat, abs0.x_hat);
        assert_eq!(exact.x_final, abs0.x_final);
    }
}
