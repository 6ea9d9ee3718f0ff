//! Minimum enclosing ball of a finite point set, used as the reference
//! optimum for the maximal-squared-distance objective.
//!
//! The center minimizes `max_i ||x - A_i||^2`. It is found through the dual
//! quadratic program over the simplex,
//! `min_{w in simplex} wᵀGw - cᵀw` with `G_ij = <A_i, A_j>` and
//! `c_i = ||A_i||^2`, solved by away-step Frank-Wolfe and then polished by an
//! active-set solve on the identified support.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vecspace::{dot, project_ball, FeasibleSet, Vector};

const FW_MAX_ITERS: usize = 500_000;
const SUPPORT_EPS: f64 = 1e-10;

/// Returns the minimum-enclosing-ball center and squared radius.
pub fn solve_meb(anchors: &[Vector], set: &FeasibleSet) -> Result<(Vector, f64)> {
    if anchors.is_empty() {
        return Err(Error::EmptyAnchors);
    }
    let m = anchors.len();
    if m == 1 {
        return Ok((anchors[0].clone(), 0.0));
    }
    let dim = anchors[0].dim();
    for a in anchors {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { left: a.dim(), right: dim });
        }
    }

    let mut gram = DMatrix::<f64>::zeros(m, m);
    let mut sq_norms = DVector::<f64>::zeros(m);
    for i in 0..m {
        for j in i..m {
            let g = dot(&anchors[i], &anchors[j])?;
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
        sq_norms[i] = gram[(i, i)];
    }

    let weights = frank_wolfe(&gram, &sq_norms);
    let weights = polish(&gram, &sq_norms, &weights).unwrap_or(weights);

    let mut center = Vector::zeros(dim);
    for (i, a) in anchors.iter().enumerate() {
        if weights[i] != 0.0 {
            center = center.axpy(weights[i], a)?;
        }
    }
    if let FeasibleSet::Ball { radius } = *set {
        // the center lies in the convex hull of the anchors, so this only
        // absorbs rounding at the boundary
        center = project_ball(&center, radius)?;
    }
    let f_star = anchors
        .iter()
        .map(|a| {
            let d = center.sub(a).expect("dimension checked");
            let n = d.norm2();
            n * n
        })
        .fold(0.0, f64::max);
    Ok((center, f_star))
}

/// Away-step Frank-Wolfe on the dual simplex QP with exact line search.
fn frank_wolfe(gram: &DMatrix<f64>, sq_norms: &DVector<f64>) -> DVector<f64> {
    let m = gram.nrows();
    let scale = 1.0 + sq_norms.amax();
    let mut w = DVector::<f64>::zeros(m);
    // start at the point with the largest norm
    w[sq_norms.imax()] = 1.0;

    for _ in 0..FW_MAX_ITERS {
        let grad = 2.0 * (gram * &w) - sq_norms;
        let mut fw_idx = 0;
        let mut away_idx = 0;
        let mut fw_val = f64::INFINITY;
        let mut away_val = f64::NEG_INFINITY;
        for i in 0..m {
            if grad[i] < fw_val {
                fw_val = grad[i];
                fw_idx = i;
            }
            if w[i] > 0.0 && grad[i] > away_val {
                away_val = grad[i];
                away_idx = i;
            }
        }
        let grad_dot_w = grad.dot(&w);
        let fw_gap = grad_dot_w - fw_val;
        if fw_gap <= 1e-14 * scale {
            break;
        }

        // direction and maximal step
        let (dir, t_max) = if fw_gap >= away_val - grad_dot_w {
            let mut d = -w.clone();
            d[fw_idx] += 1.0;
            (d, 1.0)
        } else {
            let mut d = w.clone();
            d[away_idx] -= 1.0;
            let wa = w[away_idx];
            (d, if wa < 1.0 { wa / (1.0 - wa) } else { f64::INFINITY })
        };
        let curvature = 2.0 * dir.dot(&(gram * &dir));
        let slope = grad.dot(&dir);
        let t = if curvature > 0.0 { (-slope / curvature).clamp(0.0, t_max) } else { t_max };
        if !(t > 0.0) || !t.is_finite() {
            break;
        }
        w += t * &dir;
        for wi in w.iter_mut() {
            if *wi < 0.0 {
                *wi = 0.0;
            }
        }
    }
    w
}

/// Active-set refinement: equalize squared distances on the support.
///
/// Solves the KKT system `2 G_SS w_S + kappa 1 = c_S, sum w_S = 1`, dropping
/// negative weights and admitting violated points until consistent.
fn polish(
    gram: &DMatrix<f64>,
    sq_norms: &DVector<f64>,
    warm: &DVector<f64>,
) -> Option<DVector<f64>> {
    let m = gram.nrows();
    let scale = 1.0 + sq_norms.amax();
    let mut support: Vec<usize> = (0..m).filter(|&i| warm[i] > SUPPORT_EPS).collect();
    if support.is_empty() {
        return None;
    }

    for _ in 0..200 {
        let s = support.len();
        let mut kkt = DMatrix::<f64>::zeros(s + 1, s + 1);
        let mut rhs = DVector::<f64>::zeros(s + 1);
        for (p, &i) in support.iter().enumerate() {
            for (q, &j) in support.iter().enumerate() {
                kkt[(p, q)] = 2.0 * gram[(i, j)];
            }
            kkt[(p, s)] = 1.0;
            kkt[(s, p)] = 1.0;
            rhs[p] = sq_norms[i];
        }
        rhs[s] = 1.0;
        let sol = kkt.lu().solve(&rhs)?;

        // drop the most negative weight, if any
        let mut min_idx = None;
        let mut min_val = -1e-12;
        for p in 0..s {
            if sol[p] < min_val {
                min_val = sol[p];
                min_idx = Some(p);
            }
        }
        if let Some(p) = min_idx {
            if support.len() == 1 {
                return None;
            }
            support.remove(p);
            continue;
        }

        let mut w = DVector::<f64>::zeros(m);
        for (p, &i) in support.iter().enumerate() {
            w[i] = sol[p].max(0.0);
        }
        // squared distance to point i from the center x = sum w_j A_j is
        // ||x||^2 - 2 (G w)_i + c_i
        let gw = gram * &w;
        let center_sq = w.dot(&gw);
        let dist_sq =
            |i: usize| -> f64 { center_sq - 2.0 * gw[i] + sq_norms[i] };
        let r_sq = support.iter().map(|&i| dist_sq(i)).fold(0.0, f64::max);
        let mut worst = None;
        let mut worst_excess = 1e-11 * scale;
        for i in 0..m {
            if support.contains(&i) {
                continue;
            }
            let excess = dist_sq(i) - r_sq;
            if excess > worst_excess {
                worst_excess = excess;
                worst = Some(i);
            }
        }
        match worst {
            Some(i) => support.push(i),
            None => return Some(w),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> Vector {
        Vector::new(coords.to_vec()).unwrap()
    }

    const BALL: FeasibleSet = FeasibleSet::Ball { radius: 10.0 };

    #[test]
    fn single_anchor() {
        let (x, f) = solve_meb(&[v(&[1.0, 2.0])], &BALL).unwrap();
        assert_eq!(x, v(&[1.0, 2.0]));
        assert_eq!(f, 0.0);
    }

    #[test]
    fn two_anchors_midpoint() {
        let (x, f) = solve_meb(&[v(&[0.0, 0.0]), v(&[2.0, 0.0])], &BALL).unwrap();
        assert!((x.as_slice()[0] - 1.0).abs() < 1e-10);
        assert!(x.as_slice()[1].abs() < 1e-10);
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unit_square_corners() {
        let corners = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])];
        let (x, f) = solve_meb(&corners, &BALL).unwrap();
        assert!((x.as_slice()[0] - 0.5).abs() < 1e-10);
        assert!((x.as_slice()[1] - 0.5).abs() < 1e-10);
        assert!((f - 0.5).abs() < 1e-10);
    }

    #[test]
    fn interior_point_does_not_move_center() {
        let pts = [v(&[-1.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 0.2])];
        let (x, f) = solve_meb(&pts, &BALL).unwrap();
        assert!(x.norm2() < 1e-10);
        assert!((f - 1.0).abs() < 1e-10);
    }
}
