//! First-order stationarity certification for lp-ball constrained problems.
//!
//! A feasible point is first-order optimal when either it is interior with a
//! vanishing gradient, or it sits on the boundary and some multiplier
//! `lambda >= 0` aligns the gradient with the (Frechet) normal direction on
//! the support. Residuals use the product form
//! `grad_i f(x) x_i + lambda p |x_i|^p = 0`, which is algebraically
//! equivalent to the signed-power form on the support but stays bounded as
//! `|x_i| -> 0`.

use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;
use crate::projection::WeightedL1Ball;
use crate::solver::{lp_norm_p, IterateClass, ZERO_MAG};
use ndarray::Array1;

/// Default boundary detector used when no solver config is in scope.
pub const BOUNDARY_TOL_DEFAULT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct StationarityReport {
    pub case: IterateClass,
    pub lambda: f64,
    /// Max-norm of the violated stationarity conditions (scaled).
    pub residual: f64,
    /// `||x||_p^p - r`; nonpositive up to the boundary tolerance.
    pub feasibility_gap: f64,
}

/// Closed-form multiplier for the weighted l1-ball subproblem solved at
/// `x_prev` with solution `x_next`:
/// `lambda = -sum_i [x_i grad_i + beta x_i (x_i - x_prev_i)] / (p sum_i w_i |x_i|)`.
/// Returns 0 when the ball constraint is inactive at `x_next`.
pub fn multiplier_estimate(
    x_prev: &Array1<f64>,
    x_next: &Array1<f64>,
    grad_prev: &Array1<f64>,
    beta: f64,
    ball: &WeightedL1Ball,
    p: f64,
) -> Result<f64> {
    let n = ball.dim();
    if x_prev.len() != n || x_next.len() != n || grad_prev.len() != n {
        return Err(Error::DimensionMismatch {
            context: "multiplier_estimate",
            expected: n,
            got: x_prev.len().max(x_next.len()).max(grad_prev.len()),
        });
    }
    let weighted = ball.weighted_l1(x_next);
    if weighted < ball.radius * (1.0 - 1e-10) {
        return Ok(0.0);
    }
    let denominator = p * weighted;
    if denominator < 1e-300 {
        return Ok(0.0);
    }
    let numerator: f64 = (0..n)
        .map(|i| -(x_next[i] * grad_prev[i] + beta * x_next[i] * (x_next[i] - x_prev[i])))
        .sum();
    Ok((numerator / denominator).max(0.0))
}

/// Residual of the boundary stationarity system: the feasibility defect
/// `| ||x||_p^p - r |` and, on the support, the scaled product-form defect
/// `|grad_i f(x) x_i + lambda p |x_i|^p| / max(1, |x_i|)`.
pub fn boundary_kkt_residual(
    x: &Array1<f64>,
    lambda: f64,
    grad: &Array1<f64>,
    p: f64,
    r: f64,
) -> Result<f64> {
    let s = lp_norm_p(x, p)?;
    let mut residual = (s - r).abs();
    for i in 0..x.len() {
        if x[i].abs() > ZERO_MAG {
            let defect = grad[i] * x[i] + lambda * p * x[i].abs().powf(p);
            residual = residual.max(defect.abs() / x[i].abs().max(1.0));
        }
    }
    Ok(residual)
}

/// Residual of the interior stationarity system: `||grad||_inf`.
pub fn interior_kkt_residual(x: &Array1<f64>, grad: &Array1<f64>, p: f64, r: f64) -> Result<f64> {
    let s = lp_norm_p(x, p)?;
    if s >= r {
        return Err(Error::Infeasible(format!(
            "interior residual requires ||x||_p^p = {s} < r = {r}"
        )));
    }
    Ok(grad.iter().fold(0.0, |acc, &g| acc.max(g.abs())))
}

/// Tests `eta in N_Omega(x_bar)`: interior points admit only the zero normal;
/// boundary points require a single `mu >= 0` with
/// `eta_i = mu p |x_i|^(p-1) sgn(x_i)` on the support (free off it).
pub fn normal_cone_check(
    x_bar: &Array1<f64>,
    eta: &Array1<f64>,
    p: f64,
    r: f64,
    tol: f64,
) -> Result<bool> {
    let s = lp_norm_p(x_bar, p)?;
    if s > r + BOUNDARY_TOL_DEFAULT {
        return Err(Error::Infeasible(format!("||x||_p^p = {s} > r = {r}")));
    }
    let eta_inf = eta.iter().fold(0.0, |acc: f64, &e| acc.max(e.abs()));
    if (r - s).abs() > BOUNDARY_TOL_DEFAULT {
        return Ok(eta_inf <= tol);
    }
    // Nonnegative least-squares fit of mu over the support directions.
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x_bar.len() {
        if x_bar[i].abs() > ZERO_MAG {
            let g = p * x_bar[i].abs().powf(p - 1.0) * x_bar[i].signum();
            num += eta[i] * g;
            den += g * g;
        }
    }
    let mu = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
    let mut worst = 0.0f64;
    for i in 0..x_bar.len() {
        if x_bar[i].abs() > ZERO_MAG {
            let g = p * x_bar[i].abs().powf(p - 1.0) * x_bar[i].signum();
            worst = worst.max((eta[i] - mu * g).abs());
        }
    }
    Ok(worst <= tol * eta_inf.max(1.0))
}

/// Certifies a candidate point: classifies it, recovers the least-squares
/// optimal multiplier on the boundary (clamped to `lambda >= 0`), and
/// reports the matching residual.
pub fn stationarity_report(
    x: &Array1<f64>,
    obj: &dyn SmoothObjective,
    p: f64,
    r: f64,
    boundary_tol: f64,
) -> Result<StationarityReport> {
    let s = lp_norm_p(x, p)?;
    if s > r + boundary_tol {
        return Err(Error::Infeasible(format!("||x||_p^p = {s} > r = {r}")));
    }
    let grad = obj.gradient(x);
    if (r - s).abs() <= boundary_tol {
        // min over lambda >= 0 of the stacked scaled product-form defects
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..x.len() {
            if x[i].abs() > ZERO_MAG {
                let scale = x[i].abs().max(1.0);
                let a = grad[i] * x[i] / scale;
                let b = p * x[i].abs().powf(p) / scale;
                num += a * b;
                den += b * b;
            }
        }
        let lambda = if den > 0.0 { (-num / den).max(0.0) } else { 0.0 };
        let residual = boundary_kkt_residual(x, lambda, &grad, p, r)?;
        Ok(StationarityReport {
            case: IterateClass::Boundary,
            lambda,
            residual,
            feasibility_gap: s - r,
        })
    } else {
        Ok(StationarityReport {
            case: IterateClass::Interior,
            lambda: 0.0,
            residual: grad.iter().fold(0.0, |acc, &g| acc.max(g.abs())),
            feasibility_gap: s - r,
        })
    }
}
