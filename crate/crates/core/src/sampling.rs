//! Seeded sampling helpers for feasible points and anchor sets.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::vecspace::{FeasibleSet, Vector};

/// Uniform draw from the Euclidean ball of radius `radius` (origin-centered):
/// Gaussian direction, radius `R * u^(1/n)`.
pub fn sample_in_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vector {
    let g: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Vector::zeros(dim);
    }
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / dim as f64);
    Vector::new(g.into_iter().map(|a| a * r / norm).collect()).expect("finite sample")
}

/// Strictly positive draw from the probability simplex (normalized exponentials).
pub fn sample_on_simplex(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    let e: Vec<f64> = (0..dim)
        .map(|_| {
            let u: f64 = rng.random();
            // u in [0,1); 1-u in (0,1] keeps the draw strictly positive
            -(1.0 - u).ln() + 1e-12
        })
        .collect();
    let total: f64 = e.iter().sum();
    Vector::new(e.into_iter().map(|a| a / total).collect()).expect("finite sample")
}

/// Uniform feasible draw matching the set kind.
pub fn sample_feasible(rng: &mut ChaCha8Rng, set: &FeasibleSet, dim: usize) -> Vector {
    match *set {
        FeasibleSet::Ball { radius } => sample_in_ball(rng, dim, radius),
        FeasibleSet::Simplex { dim } => sample_on_simplex(rng, dim),
    }
}
