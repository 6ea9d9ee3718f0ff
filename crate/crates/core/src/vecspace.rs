//! Dense real vectors, primal/dual norm pairs and the feasible-set geometry
//! used by every other module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vector in `R^n`. Every coordinate is finite; constructors reject
/// NaN and infinities so downstream arithmetic never has to re-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "Vector::new" });
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// Constant vector `(value, ..., value)`.
    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + s * other`, the common update step.
    pub fn axpy(&self, s: f64, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect()))
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn norm1(&self) -> f64 {
        self.0.iter().map(|a| a.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0.0)
    }
}

/// Inner product `sum_i a_i b_i`.
pub fn dot(a: &Vector, b: &Vector) -> Result<f64> {
    a.check_dim(b)?;
    Ok(a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum())
}

/// Euclidean projection onto the ball of radius `radius` centered at the origin.
pub fn project_ball(x: &Vector, radius: f64) -> Result<Vector> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
    }
    let mut y = x.clone();
    // iterate to a fixed point so projecting twice is bitwise stable
    loop {
        let n = y.norm2();
        if n <= radius {
            return Ok(y);
        }
        let factor = radius / n;
        if factor >= 1.0 {
            return Ok(y);
        }
        y = y.scale(factor);
    }
}

/// The two primal/dual norm pairings in use: the self-dual Euclidean pair
/// and the l1 primal with l-infinity dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormPair {
    Euclidean,
    L1Linf,
}

impl NormPair {
    pub fn primal(&self, v: &Vector) -> f64 {
        match self {
            NormPair::Euclidean => v.norm2(),
            NormPair::L1Linf => v.norm1(),
        }
    }

    pub fn dual(&self, g: &Vector) -> f64 {
        match self {
            NormPair::Euclidean => g.norm2(),
            NormPair::L1Linf => g.norm_inf(),
        }
    }
}

/// Feasible set `Q`: a Euclidean ball centered at the origin, or the
/// probability simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    Ball { radius: f64 },
    Simplex { dim: usize },
}

impl FeasibleSet {
    pub fn contains(&self, x: &Vector) -> bool {
        match *self {
            FeasibleSet::Ball { radius } => x.norm2() <= radius + 1e-12 * (1.0 + radius),
            FeasibleSet::Simplex { dim } => {
                x.dim() == dim
                    && x.iter().all(|&c| c >= 0.0)
                    && (x.iter().sum::<f64>() - 1.0).abs() <= 1e-12
            }
        }
    }
}
