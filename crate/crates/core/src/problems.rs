//! Benchmark objectives: a norm-plus-squared-norm function and the maximal
//! squared distance to a point set, plus the problem abstraction they share.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prox::{bregman, ProxSetup};
use crate::sampling::{sample_feasible, sample_in_ball};
use crate::vecspace::{dot, FeasibleSet, NormPair, Vector};

pub mod meb;

/// Which Lipschitz-constant estimate to use when evaluating classical bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LipschitzMode {
    Paper,
    Analytic,
}

/// A relatively strongly convex objective bound to its feasible set.
///
/// `subgrad` is a fixed, deterministic selector from the subdifferential.
pub struct Problem {
    pub name: String,
    pub mu: f64,
    pub lipschitz_paper: Option<f64>,
    pub lipschitz_analytic: Option<f64>,
    pub optimum: Option<(Vector, f64)>,
    pub set: FeasibleSet,
    pub dim: usize,
    eval_f: Box<dyn Fn(&Vector) -> f64 + Send + Sync>,
    subgrad: Box<dyn Fn(&Vector) -> Vector + Send + Sync>,
}

impl Problem {
    pub fn eval_f(&self, x: &Vector) -> f64 {
        (self.eval_f)(x)
    }

    pub fn subgrad(&self, x: &Vector) -> Vector {
        (self.subgrad)(x)
    }

    pub fn lipschitz(&self, mode: LipschitzMode) -> Option<f64> {
        match mode {
            LipschitzMode::Paper => self.lipschitz_paper,
            LipschitzMode::Analytic => self.lipschitz_analytic,
        }
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("mu", &self.mu)
            .field("set", &self.set)
            .field("dim", &self.dim)
            .finish()
    }
}

/// Parameters for `f(x) = ||x||_2 + 2 c ||x||_2^2` on a ball.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Example1Params {
    pub n: usize,
    pub radius: f64,
    pub gamma_coef: f64,
}

/// Parameters for `f(x) = max_i ||x - A_i||_2^2` on a ball. When `anchors`
/// is absent, `m` points are sampled uniformly in the ball of radius `R/2`.
#[derive(Debug, Clone)]
pub struct Example2Params {
    pub n: usize,
    pub radius: f64,
    pub m: usize,
    pub anchors: Option<Vec<Vector>>,
    pub seed: u64,
}

pub fn make_example1(p: &Example1Params) -> Result<Problem> {
    if p.n < 1 || !(p.radius > 0.0) || !(p.gamma_coef > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "example1 requires n >= 1, radius > 0, gamma_coef > 0 (got n={}, R={}, gamma={})",
            p.n, p.radius, p.gamma_coef
        )));
    }
    let c = p.gamma_coef;
    let eval_f = move |x: &Vector| {
        let n = x.norm2();
        n + 2.0 * c * n * n
    };
    let subgrad = move |x: &Vector| {
        let n = x.norm2();
        if n == 0.0 {
            // 0 is a valid subgradient at the minimizer
            Vector::zeros(x.dim())
        } else {
            x.scale(1.0 / n + 4.0 * c)
        }
    };
    Ok(Problem {
        name: "ex1".into(),
        mu: 2.0 * c,
        lipschitz_paper: Some(1.0 + 2.0 * c * p.radius),
        lipschitz_analytic: Some(1.0 + 4.0 * c * p.radius),
        optimum: Some((Vector::zeros(p.n), 0.0)),
        set: FeasibleSet::Ball { radius: p.radius },
        dim: p.n,
        eval_f: Box::new(eval_f),
        subgrad: Box::new(subgrad),
    })
}

pub fn make_example2(p: &Example2Params) -> Result<Problem> {
    if p.n < 1 || !(p.radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "example2 requires n >= 1 and radius > 0 (got n={}, R={})",
            p.n, p.radius
        )));
    }
    let anchors: Vec<Vector> = match &p.anchors {
        Some(a) => a.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
            (0..p.m).map(|_| sample_in_ball(&mut rng, p.n, p.radius / 2.0)).collect()
        }
    };
    if anchors.is_empty() {
        return Err(Error::EmptyAnchors);
    }
    let set = FeasibleSet::Ball { radius: p.radius };
    for a in &anchors {
        if a.dim() != p.n {
            return Err(Error::DimensionMismatch { left: a.dim(), right: p.n });
        }
        if !set.contains(a) {
            return Err(Error::InfeasiblePoint { context: "example2 anchor outside ball" });
        }
    }
    let max_anchor_norm = anchors.iter().map(Vector::norm2).fold(0.0, f64::max);
    let lipschitz = 2.0 * (p.radius + max_anchor_norm);
    let optimum = meb::solve_meb(&anchors, &set)?;

    let eval_anchors = anchors.clone();
    let eval_f = move |x: &Vector| {
        eval_anchors
            .iter()
            .map(|a| {
                let d = x.sub(a).expect("anchor dimension checked at construction");
                let n = d.norm2();
                n * n
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let grad_anchors = anchors;
    let subgrad = move |x: &Vector| {
        // smallest maximizing index wins ties
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, a) in grad_anchors.iter().enumerate() {
            let d = x.sub(a).expect("anchor dimension checked at construction");
            let n = d.norm2();
            let val = n * n;
            if val > best_val {
                best_val = val;
                best = i;
            }
        }
        x.sub(&grad_anchors[best]).expect("dimension checked").scale(2.0)
    };
    Ok(Problem {
        name: "ex2".into(),
        mu: 2.0,
        lipschitz_paper: Some(lipschitz),
        lipschitz_analytic: Some(lipschitz),
        optimum: Some(optimum),
        set,
        dim: p.n,
        eval_f: Box::new(eval_f),
        subgrad: Box::new(subgrad),
    })
}

/// Starting iterate: `(R/sqrt(n), ..., R/sqrt(n))` on the ball, the uniform
/// distribution on the simplex.
pub fn initial_point(set: &FeasibleSet, dim: usize) -> Vector {
    match *set {
        FeasibleSet::Ball { radius } => {
            Vector::constant(dim, radius / (dim as f64).sqrt()).expect("finite initial point")
        }
        FeasibleSet::Simplex { dim } => {
            Vector::constant(dim, 1.0 / dim as f64).expect("finite initial point")
        }
    }
}

/// Samples `samples` feasible pairs and returns the largest violation of
/// `f(y) >= f(x) + <g(x), y - x> + mu * V_psi(y, x)`. Non-positive (up to
/// rounding) when `(mu, subgrad)` are consistent with the prox geometry.
pub fn validate_relative_strong_convexity(
    pr: &Problem,
    ps: &ProxSetup,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = sample_feasible(&mut rng, &pr.set, pr.dim);
        let y = sample_feasible(&mut rng, &pr.set, pr.dim);
        let lhs = pr.eval_f(&x)
            + dot(&pr.subgrad(&x), &y.sub(&x)?)?
            + pr.mu * bregman(ps, &y, &x)?;
        worst = worst.max(lhs - pr.eval_f(&y));
    }
    Ok(worst)
}

/// Reads one anchor per line, whitespace-separated decimal coordinates.
pub fn load_anchors(path: &std::path::Path) -> Result<Vec<Vector>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read anchors file: {e}")))?;
    let mut anchors = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let coords: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        let coords = coords.map_err(|e| {
            Error::InvalidParameter(format!("anchors file line {}: {e}", lineno + 1))
        })?;
        anchors.push(Vector::new(coords)?);
    }
    if anchors.is_empty() {
        return Err(Error::EmptyAnchors);
    }
    Ok(anchors)
}

/// Dual-norm of the subgradient at `x` under the problem's natural pairing.
pub fn subgrad_dual_norm(pr: &Problem, norms: NormPair, x: &Vector) -> f64 {
    norms.dual(&pr.subgrad(x))
}
