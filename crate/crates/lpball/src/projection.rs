//! Exact Euclidean projections onto weighted l1 balls, plus the l1-ball and
//! top-k projections used by the baseline solvers.
//!
//! The weighted projection solves
//!
//! ```text
//! min_x 1/2 ||x - v||^2   s.t.  sum_i w_i |x_i| <= R,  x_i = 0 for i in fixed_zero
//! ```
//!
//! by soft-thresholding: `x_i = sgn(v_i) max(|v_i| - theta w_i, 0)` where
//! `theta >= 0` is the exact root of the piecewise-linear
//! `g(theta) = sum_i w_i max(|v_i| - theta w_i, 0) - R`, located by sorting
//! the breakpoints `|v_i| / w_i`.

use crate::error::{Error, Result};
use ndarray::Array1;

/// Ratio over the smallest weight beyond which a coordinate is pinned to zero
/// before projecting. Keeps `w_i^2` terms representable when reweighting
/// produces astronomically large weights on near-zero coordinates.
pub const WEIGHT_PIN_RATIO: f64 = 1e12;

/// A weighted l1 ball `{ x : sum_i w_i |x_i| <= radius }` with an optional set
/// of coordinates constrained to exactly zero.
#[derive(Debug, Clone)]
pub struct WeightedL1Ball {
    pub weights: Array1<f64>,
    pub radius: f64,
    /// Sorted, deduplicated indices pinned to zero.
    pub fixed_zero: Vec<usize>,
}

impl WeightedL1Ball {
    pub fn new(weights: Array1<f64>, radius: f64, mut fixed_zero: Vec<usize>) -> Result<Self> {
        fixed_zero.sort_unstable();
        fixed_zero.dedup();
        let ball = WeightedL1Ball {
            weights,
            radius,
            fixed_zero,
        };
        ball.validate()?;
        Ok(ball)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "radius",
                constraint: "must be positive and finite",
            });
        }
        if let Some(&i) = self.fixed_zero.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::DimensionMismatch {
                context: "fixed_zero index out of range",
                expected: self.dim(),
                got: i,
            });
        }
        let mut pinned = vec![false; self.dim()];
        for &i in &self.fixed_zero {
            pinned[i] = true;
        }
        for (i, &w) in self.weights.iter().enumerate() {
            if !pinned[i] && !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "weights",
                    constraint: "must be strictly positive and finite outside fixed_zero",
                });
            }
        }
        Ok(())
    }

    fn pinned_mask(&self) -> Vec<bool> {
        let mut pinned = vec![false; self.dim()];
        for &i in &self.fixed_zero {
            pinned[i] = true;
        }
        pinned
    }

    /// Weighted l1 value `sum w_i |x_i|` over the free coordinates.
    pub fn weighted_l1(&self, x: &Array1<f64>) -> f64 {
        let pinned = self.pinned_mask();
        x.iter()
            .zip(self.weights.iter())
            .enumerate()
            .filter(|(i, _)| !pinned[*i])
            .map(|(_, (&xi, &wi))| wi * xi.abs())
            .sum()
    }
}

/// Exact projection onto a weighted l1 ball via breakpoint sorting, O(n log n).
///
/// Coordinates whose weight exceeds `WEIGHT_PIN_RATIO` times the smallest free
/// weight are treated as pinned to zero; the result is still feasible since
/// dropping coordinates only loosens the constraint.
pub fn project_weighted_l1(v: &Array1<f64>, ball: &WeightedL1Ball) -> Result<Array1<f64>> {
    ball.validate()?;
    if v.len() != ball.dim() {
        return Err(Error::DimensionMismatch {
            context: "project_weighted_l1 input",
            expected: ball.dim(),
            got: v.len(),
        });
    }
    let mut pinned = ball.pinned_mask();
    let min_w = ball
        .weights
        .iter()
        .enumerate()
        .filter(|(i, _)| !pinned[*i])
        .map(|(_, &w)| w)
        .fold(f64::INFINITY, f64::min);
    if min_w.is_finite() {
        for (i, &w) in ball.weights.iter().enumerate() {
            if !pinned[i] && w >= WEIGHT_PIN_RATIO * min_w {
                pinned[i] = true;
            }
        }
    }

    let mut out = Array1::zeros(v.len());
    // Feasibility check on the free coordinates; interior points project to themselves.
    let total: f64 = v
        .iter()
        .zip(ball.weights.iter())
        .enumerate()
        .filter(|(i, _)| !pinned[*i])
        .map(|(_, (&vi, &wi))| wi * vi.abs())
        .sum();
    if total <= ball.radius {
        for i in 0..v.len() {
            if !pinned[i] {
                out[i] = v[i];
            }
        }
        return Ok(out);
    }

    // Sort breakpoints |v_i|/w_i descending; theta lives in one of the
    // intervals between consecutive breakpoints, where
    // g(theta) = sum_{active} w_i|v_i| - theta sum_{active} w_i^2 - R.
    let mut order: Vec<usize> = (0..v.len())
        .filter(|&i| !pinned[i] && v[i] != 0.0)
        .collect();
    order.sort_by(|&a, &b| {
        let za = v[a].abs() / ball.weights[a];
        let zb = v[b].abs() / ball.weights[b];
        zb.partial_cmp(&za).unwrap().then(a.cmp(&b))
    });

    let mut s_wv = 0.0; // sum of w_i |v_i| over active set
    let mut s_ww = 0.0; // sum of w_i^2 over active set
    let mut theta = 0.0;
    for (j, &i) in order.iter().enumerate() {
        s_wv += ball.weights[i] * v[i].abs();
        s_ww += ball.weights[i] * ball.weights[i];
        let candidate = (s_wv - ball.radius) / s_ww;
        let next_z = order
            .get(j + 1)
            .map(|&k| v[k].abs() / ball.weights[k])
            .unwrap_or(0.0);
        if candidate >= next_z {
            theta = candidate;
            break;
        }
    }

    for i in 0..v.len() {
        if pinned[i] {
            continue;
        }
        let mag = v[i].abs() - theta * ball.weights[i];
        if mag > 0.0 {
            out[i] = v[i].signum() * mag;
        }
    }
    Ok(out)
}

/// Projection onto the plain l1 ball of the given radius.
pub fn project_l1(v: &Array1<f64>, radius: f64) -> Result<Array1<f64>> {
    let ball = WeightedL1Ball::new(Array1::ones(v.len()), radius, Vec::new())?;
    project_weighted_l1(v, &ball)
}

/// Keeps the `k` largest-magnitude entries, zeroing the rest. Ties are broken
/// by keeping the lowest index.
pub fn hard_threshold(v: &Array1<f64>, k: usize) -> Result<Array1<f64>> {
    if k == 0 || k > v.len() {
        return Err(Error::InvalidParameter {
            name: "k",
            constraint: "must satisfy 1 <= k <= dim(v)",
        });
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        v[b].abs()
            .partial_cmp(&v[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut out = Array1::zeros(v.len());
    for &i in order.iter().take(k) {
        out[i] = v[i];
    }
    Ok(out)
}

/// Slow bisection solver for the same weighted projection, used as a test
/// oracle. Bisects `theta` over `[0, max |v_i|/w_i]` until
/// `|g(theta)| <= tol * radius`.
pub fn bisection_oracle_project(
    v: &Array1<f64>,
    ball: &WeightedL1Ball,
    tol: f64,
) -> Result<Array1<f64>> {
    ball.validate()?;
    if v.len() != ball.dim() {
        return Err(Error::DimensionMismatch {
            context: "bisection_oracle_project input",
            expected: ball.dim(),
            got: v.len(),
        });
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidParameter {
            name: "tol",
            constraint: "must be positive",
        });
    }
    let pinned = ball.pinned_mask();
    let shrink = |theta: f64| -> Array1<f64> {
        let mut out = Array1::zeros(v.len());
        for i in 0..v.len() {
            if pinned[i] {
                continue;
            }
            let mag = v[i].abs() - theta * ball.weights[i];
            if mag > 0.0 {
                out[i] = v[i].signum() * mag;
            }
        }
        out
    };
    let g = |theta: f64| -> f64 {
        (0..v.len())
            .filter(|&i| !pinned[i])
            .map(|i| ball.weights[i] * (v[i].abs() - theta * ball.weights[i]).max(0.0))
            .sum::<f64>()
            - ball.radius
    };
    if g(0.0) <= 0.0 {
        return Ok(shrink(0.0));
    }
    let mut lo = 0.0;
    let mut hi = (0..v.len())
        .filter(|&i| !pinned[i])
        .map(|i| v[i].abs() / ball.weights[i])
        .fold(0.0, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let val = g(mid);
        if val.abs() <= tol * ball.radius {
            return Ok(shrink(mid));
        }
        if val > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(shrink(0.5 * (lo + hi)))
}
