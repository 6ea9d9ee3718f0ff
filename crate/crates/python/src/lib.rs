//! Python bindings: benchmark problems, the mirror-descent solver and the
//! bound evaluators, mirroring the CLI's capabilities for scripted use.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bsubgrad_core as mdcore;
use mdcore::{
    bounds, solver, Aggregates, Example1Params, Example2Params, FeasibleSet, InexactnessModel,
    LipschitzMode, NoiseMagnitude, NoiseMode, ProxSetup, RunParams, StepKind, StepRule, Vector,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec(x: Vec<f64>) -> PyResult<Vector> {
    Vector::new(x).map_err(err)
}

fn anchors_from(raw: Vec<Vec<f64>>) -> PyResult<Vec<Vector>> {
    raw.into_iter().map(vec).collect()
}

/// `"euclidean:<radius>"` or `"entropy:<dim>"`.
fn parse_setup(spec: &str) -> PyResult<ProxSetup> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| err("prox spec must be euclidean:<radius> or entropy:<dim>"))?;
    match kind {
        "euclidean" => {
            let radius: f64 = arg.parse().map_err(err)?;
            Ok(ProxSetup::EuclideanBall { radius })
        }
        "entropy" => {
            let dim: usize = arg.parse().map_err(err)?;
            Ok(ProxSetup::EntropySimplex { dim })
        }
        other => Err(err(format!("unknown prox geometry '{other}'"))),
    }
}

fn setup_for(set: &FeasibleSet) -> ProxSetup {
    match *set {
        FeasibleSet::Ball { radius } => ProxSetup::EuclideanBall { radius },
        FeasibleSet::Simplex { dim } => ProxSetup::EntropySimplex { dim },
    }
}

fn parse_noise_mode(s: &str) -> PyResult<NoiseMode> {
    match s {
        "random" => Ok(NoiseMode::Random),
        "adversarial" => Ok(NoiseMode::Adversarial),
        other => Err(err(format!("noise mode must be random or adversarial, got '{other}'"))),
    }
}

fn parse_noise_magnitude(s: &str) -> PyResult<NoiseMagnitude> {
    match s {
        "worst" => Ok(NoiseMagnitude::Worst),
        "uniform" => Ok(NoiseMagnitude::Uniform),
        other => Err(err(format!("noise magnitude must be worst or uniform, got '{other}'"))),
    }
}

fn parse_step_rule(s: &str) -> PyResult<StepKind> {
    match s {
        "exact" => Ok(StepKind::ExactTheorem),
        "inexact" => Ok(StepKind::InexactTheorem),
        other => Err(err(format!("step rule must be exact or inexact, got '{other}'"))),
    }
}

/// A benchmark objective with its feasible set, relative-strong-convexity
/// modulus and (when known) reference optimum.
#[pyclass(frozen)]
struct Problem {
    inner: mdcore::Problem,
}

#[pymethods]
impl Problem {
    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn lipschitz_paper(&self) -> Option<f64> {
        self.inner.lipschitz_paper
    }

    #[getter]
    fn lipschitz_analytic(&self) -> Option<f64> {
        self.inner.lipschitz_analytic
    }

    /// `(x_star, f_star)` when the reference optimum is known.
    #[getter]
    fn optimum(&self) -> Option<(Vec<f64>, f64)> {
        self.inner
            .optimum
            .as_ref()
            .map(|(x, f)| (x.as_slice().to_vec(), *f))
    }

    fn eval_f(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.eval_f(&vec(x)?))
    }

    fn subgrad(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.subgrad(&vec(x)?).as_slice().to_vec())
    }

    fn feasible(&self, x: Vec<f64>) -> PyResult<bool> {
        Ok(self.inner.set.contains(&vec(x)?))
    }

    fn __repr__(&self) -> String {
        format!("Problem(name='{}', dim={}, mu={})", self.inner.name, self.inner.dim, self.inner.mu)
    }
}

/// Final state and per-checkpoint trace of one solver run.
#[pyclass(frozen)]
struct RunResult {
    record: solver::RunRecord,
}

#[pymethods]
impl RunResult {
    #[getter]
    fn iters(&self) -> usize {
        self.record.iters
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.record.mu
    }

    #[getter]
    fn f_x_hat(&self) -> f64 {
        self.record.f_x_hat
    }

    #[getter]
    fn gap(&self) -> Option<f64> {
        self.record.gap
    }

    #[getter]
    fn dist(&self) -> Option<f64> {
        self.record.dist
    }

    #[getter]
    fn x_hat(&self) -> Vec<f64> {
        self.record.x_hat.as_slice().to_vec()
    }

    /// Final aggregate sums `(s1, s2, s3, s4, s5)`.
    #[getter]
    fn aggregates(&self) -> (f64, f64, f64, f64, f64) {
        let a = self.record.aggregates;
        (a.s1, a.s2, a.s3, a.s4, a.s5)
    }

    /// Checkpoint rows `(k, f_x, f_avg, gap_avg, dist_avg)`.
    fn checkpoints(&self) -> Vec<(usize, f64, f64, Option<f64>, Option<f64>)> {
        self.record
            .checkpoints
            .iter()
            .map(|cp| (cp.k, cp.f_x, cp.f_avg, cp.gap_avg, cp.dist_avg))
            .collect()
    }

    /// All applicable bound values at the final iterate.
    #[pyo3(signature = (lipschitz=None))]
    fn bounds<'py>(&self, py: Python<'py>, lipschitz: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
        let rep = bounds::report(&self.record, lipschitz, LipschitzMode::Analytic).map_err(err)?;
        report_dict(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(iters={}, f_x_hat={}, gap={:?})",
            self.record.iters, self.record.f_x_hat, self.record.gap
        )
    }
}

fn report_dict<'py>(py: Python<'py>, rep: &bounds::BoundReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n", rep.n)?;
    d.set_item("bound_func_new", rep.bound_func_new)?;
    d.set_item("bound_dist_new", rep.bound_dist_new)?;
    d.set_item("bound_func_classical", rep.bound_func_classical)?;
    d.set_item("bound_dist_classical", rep.bound_dist_classical)?;
    d.set_item("bound_func_relative", rep.bound_func_relative)?;
    d.set_item("bound_dist_relative", rep.bound_dist_relative)?;
    d.set_item("bound_func_absolute", rep.bound_func_absolute)?;
    d.set_item("bound_dist_absolute", rep.bound_dist_absolute)?;
    Ok(d)
}

/// `f(x) = ||x||_2 + 2*gamma*||x||_2^2` on the ball of the given radius.
#[pyfunction]
#[pyo3(signature = (n, radius=10.0, gamma=0.5))]
fn example1(n: usize, radius: f64, gamma: f64) -> PyResult<Problem> {
    let inner =
        mdcore::make_example1(&Example1Params { n, radius, gamma_coef: gamma }).map_err(err)?;
    Ok(Problem { inner })
}

/// `f(x) = max_i ||x - A_i||_2^2` on the ball of the given radius. Anchors
/// are seeded uniformly in the half-radius ball unless given explicitly.
#[pyfunction]
#[pyo3(signature = (n, radius=10.0, m=50, seed=0, anchors=None))]
fn example2(
    n: usize,
    radius: f64,
    m: usize,
    seed: u64,
    anchors: Option<Vec<Vec<f64>>>,
) -> PyResult<Problem> {
    let anchors = anchors.map(anchors_from).transpose()?;
    let inner = mdcore::make_example2(&Example2Params { n, radius, m, anchors, seed })
        .map_err(err)?;
    Ok(Problem { inner })
}

/// Executes mirror descent on `problem` with the prox geometry matched to
/// its feasible set. `oracle` is `exact`, `relative:<alpha>` or
/// `absolute:<delta>`; the step rule defaults to the theorem matching it.
#[pyfunction]
#[pyo3(signature = (
    problem, oracle="exact", iters=1000, seed=1, stream=0, log_every=None,
    step_rule=None, noise_mode="random", noise_magnitude="worst",
))]
#[allow(clippy::too_many_arguments)]
fn run(
    problem: &Problem,
    oracle: &str,
    iters: usize,
    seed: u64,
    stream: u64,
    log_every: Option<usize>,
    step_rule: Option<&str>,
    noise_mode: &str,
    noise_magnitude: &str,
) -> PyResult<RunResult> {
    let model: InexactnessModel = oracle.parse().map_err(err)?;
    let pr = &problem.inner;
    let rule = match step_rule {
        Some(s) => StepRule { kind: parse_step_rule(s)?, mu: pr.mu },
        None => StepRule::matched_to(model, pr.mu),
    };
    let params = RunParams {
        model,
        rule,
        iters,
        seed,
        stream,
        log_every: log_every.unwrap_or_else(|| (iters / 100).max(1)),
        magnitude: parse_noise_magnitude(noise_magnitude)?,
        mode: parse_noise_mode(noise_mode)?,
    };
    let record = solver::run(pr, &setup_for(&pr.set), &params).map_err(err)?;
    Ok(RunResult { record })
}

/// Evaluates every applicable bound from raw aggregate sums
/// `(s1, s2, s3, s4, s5)` after `n` iterations.
#[pyfunction]
#[pyo3(signature = (aggregates, n, mu, oracle="exact", lipschitz=None))]
fn bounds_report<'py>(
    py: Python<'py>,
    aggregates: (f64, f64, f64, f64, f64),
    n: usize,
    mu: f64,
    oracle: &str,
    lipschitz: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let model: InexactnessModel = oracle.parse().map_err(err)?;
    let (s1, s2, s3, s4, s5) = aggregates;
    let agg = Aggregates { s1, s2, s3, s4, s5 };
    let rep = bounds::report_at(&agg, n, mu, model, lipschitz, LipschitzMode::Analytic)
        .map_err(err)?;
    report_dict(py, &rep)
}

/// Smallest iteration count with `2 M^2 / (mu (N+1)) <= eps`.
#[pyfunction]
fn iterations_for_epsilon(mu: f64, lipschitz: f64, eps: f64) -> usize {
    bounds::iterations_for_epsilon(mu, lipschitz, eps)
}

/// Center and optimal value of `min_x max_i ||x - a_i||^2` over the ball.
#[pyfunction]
fn solve_meb(anchors: Vec<Vec<f64>>, radius: f64) -> PyResult<(Vec<f64>, f64)> {
    let anchors = anchors_from(anchors)?;
    let (x, f) = mdcore::solve_meb(&anchors, &FeasibleSet::Ball { radius }).map_err(err)?;
    Ok((x.as_slice().to_vec(), f))
}

/// Worst observed violation of `f(y) >= f(x) + <g, y-x> + mu V(y, x)` over
/// sampled feasible pairs; at most ~1e-8 for a correctly stated `mu`.
#[pyfunction]
#[pyo3(signature = (problem, samples=1000, seed=0))]
fn validate_relative_strong_convexity(problem: &Problem, samples: usize, seed: u64) -> PyResult<f64> {
    let pr = &problem.inner;
    mdcore::validate_relative_strong_convexity(pr, &setup_for(&pr.set), samples, seed).map_err(err)
}

/// Bregman divergence `V(x, y)` of the given prox geometry.
#[pyfunction]
fn bregman(prox: &str, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    mdcore::bregman(&parse_setup(prox)?, &vec(x)?, &vec(y)?).map_err(err)
}

/// One mirror-descent step from `x` along subgradient `g` with step `gamma`.
#[pyfunction]
fn mirror_step(prox: &str, x: Vec<f64>, g: Vec<f64>, gamma: f64) -> PyResult<Vec<f64>> {
    let next = mdcore::mirror_step(&parse_setup(prox)?, &vec(x)?, &vec(g)?, gamma).map_err(err)?;
    Ok(next.as_slice().to_vec())
}

#[pymodule]
fn bsubgrad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(example1, m)?)?;
    m.add_function(wrap_pyfunction!(example2, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_report, m)?)?;
    m.add_function(wrap_pyfunction!(iterations_for_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(solve_meb, m)?)?;
    m.add_function(wrap_pyfunction!(validate_relative_strong_convexity, m)?)?;
    m.add_function(wrap_pyfunction!(bregman, m)?)?;
    m.add_function(wrap_pyfunction!(mirror_step, m)?)?;
    m.add("VERSION", mdcore::VERSION)?;
    Ok(())
}
