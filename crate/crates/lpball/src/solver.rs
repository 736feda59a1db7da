//! Iteratively reweighted l1-ball solver for smooth minimization over the
//! nonconvex lp ball `{ x : sum |x_i|^p <= r }` with `0 < p < 1`, together
//! with the IHT (`p = 0`) and l1 projected-gradient (`p = 1`) baselines.
//!
//! Each outer iteration takes the gradient step `x - grad f(x) / beta` and
//! projects it onto a weighted l1 ball approximating the lp ball at `x`. On
//! the boundary the ball linearizes the constraint on the support and pins
//! the zero coordinates (branch P1); in the interior the zero coordinates
//! receive finite weights `eps^(p-1)` driven by the constraint residual
//! (branch P2).

use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;
use crate::optimality::multiplier_estimate;
use crate::projection::{hard_threshold, project_l1, project_weighted_l1, WeightedL1Ball};
use ndarray::Array1;
use rand::Rng;

/// Magnitudes at or below this are treated as exact zeros when splitting
/// coordinates into support and zero set.
pub const ZERO_MAG: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterateClass {
    Boundary,
    Interior,
}

/// Subproblem branch taken at an iteration: P1 linearizes on the boundary,
/// P2 uses residual-driven weights in the interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    P1,
    P2,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Exponent of the lp ball, in (0, 1).
    pub p: f64,
    /// Radius of the lp ball.
    pub r: f64,
    /// Perturbation factor in (0, 1) for the interior branch.
    pub c: f64,
    /// Stepsize control: beta = beta_factor * L with beta_factor > 1.
    pub beta_factor: f64,
    /// Displacement stopping tolerance.
    pub tol: f64,
    /// Boundary detector: |r - ||x||_p^p| <= boundary_tol means boundary.
    pub boundary_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(p: f64, r: f64) -> Self {
        SolverConfig {
            p,
            r,
            c: 0.95,
            beta_factor: 1.1,
            tol: 1e-5,
            boundary_tol: 1e-8,
            max_iter: 100_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, &'static str, bool); 7] = [
            ("p", "must lie in (0,1)", self.p > 0.0 && self.p < 1.0),
            ("r", "must be positive", self.r > 0.0 && self.r.is_finite()),
            ("c", "must lie in (0,1)", self.c > 0.0 && self.c < 1.0),
            (
                "beta_factor",
                "must be greater than 1",
                self.beta_factor > 1.0,
            ),
            ("tol", "must be positive", self.tol > 0.0),
            ("boundary_tol", "must be positive", self.boundary_tol > 0.0),
            ("max_iter", "must be at least 1", self.max_iter >= 1),
        ];
        for (name, constraint, ok) in checks {
            if !ok {
                return Err(Error::InvalidParameter { name, constraint });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

/// One outer-iteration record.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    /// Objective at the new iterate.
    pub objective: f64,
    /// ||x_{k+1} - x_k||_2.
    pub displacement: f64,
    /// ||x_{k+1}||_p^p (None for the p=0/p=1 baselines).
    pub lp_norm: Option<f64>,
    pub branch: Option<Branch>,
    /// Perturbation parameter when branch P2 was taken.
    pub epsilon: Option<f64>,
    /// Multiplier estimate for the subproblem ball constraint.
    pub lambda: Option<f64>,
    /// Coordinates pinned by the weight overflow guard this iteration.
    pub pinned: usize,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x_final: Array1<f64>,
    pub lambda_final: f64,
    pub status: SolveStatus,
    pub trace: Vec<TraceRecord>,
}

impl SolveReport {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

/// `sum_i |x_i|^p` for `p` in (0, 1).
pub fn lp_norm_p(x: &Array1<f64>, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            constraint: "must lie in (0,1)",
        });
    }
    Ok(x.iter().map(|&xi| xi.abs().powf(p)).sum())
}

fn zero_set(x: &Array1<f64>) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i].abs() <= ZERO_MAG).collect()
}

/// Classifies `x` as boundary or interior of the lp ball.
pub fn classify_iterate(x: &Array1<f64>, cfg: &SolverConfig) -> Result<IterateClass> {
    let s = lp_norm_p(x, cfg.p)?;
    if s > cfg.r + cfg.boundary_tol {
        return Err(Error::Infeasible(format!(
            "||x||_p^p = {s} exceeds r = {} beyond boundary_tol",
            cfg.r
        )));
    }
    if (cfg.r - s).abs() <= cfg.boundary_tol {
        Ok(IterateClass::Boundary)
    } else {
        Ok(IterateClass::Interior)
    }
}

/// Perturbation parameter `eps = c ((r - ||x||_p^p) / (|A(x)| + 1))^(1/p)`.
pub fn epsilon_k(x: &Array1<f64>, cfg: &SolverConfig) -> Result<f64> {
    let s = lp_norm_p(x, cfg.p)?;
    let residual = cfg.r - s;
    if residual < -cfg.boundary_tol {
        return Err(Error::Infeasible(format!(
            "negative constraint residual {residual}"
        )));
    }
    let a = zero_set(x).len() as f64;
    Ok(cfg.c * (residual.max(0.0) / (a + 1.0)).powf(1.0 / cfg.p))
}

/// Interior-branch ball radius
/// `r_k = (1/p)(r + (p-1)||x||_p^p - |A(x)| eps^p)`, which stays above
/// `((1-c^p)/p)(r - ||x||_p^p) > 0` when `eps` comes from [`epsilon_k`].
pub fn radius_k(x: &Array1<f64>, eps: f64, cfg: &SolverConfig) -> Result<f64> {
    let s = lp_norm_p(x, cfg.p)?;
    let a = zero_set(x).len() as f64;
    let rk = (cfg.r + (cfg.p - 1.0) * s - a * eps.powf(cfg.p)) / cfg.p;
    if rk <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "radius_k",
            constraint: "must be positive (eps inconsistent with the residual)",
        });
    }
    Ok(rk)
}

/// Builds the weighted l1-ball subproblem at `x_k` and the gradient step
/// point to project. Coordinates whose reweighting weight overflows f64 are
/// moved into the ball's pinned set.
pub fn build_subproblem(
    x_k: &Array1<f64>,
    grad: &Array1<f64>,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<(WeightedL1Ball, Array1<f64>, Branch, Option<f64>)> {
    let class = classify_iterate(x_k, cfg)?;
    let n = x_k.len();
    let step = x_k - &(grad / beta);
    let zero: Vec<usize> = zero_set(x_k);
    match class {
        IterateClass::Boundary => {
            let mut weights = Array1::ones(n);
            for i in 0..n {
                if x_k[i].abs() > ZERO_MAG {
                    weights[i] = x_k[i].abs().powf(cfg.p - 1.0);
                }
            }
            let mut fixed = zero;
            for i in 0..n {
                if !weights[i].is_finite() {
                    fixed.push(i);
                }
            }
            let ball = WeightedL1Ball::new(weights, cfg.r, fixed)?;
            Ok((ball, step, Branch::P1, None))
        }
        IterateClass::Interior => {
            let eps = epsilon_k(x_k, cfg)?;
            let rk = radius_k(x_k, eps, cfg)?;
            let eps_weight = eps.powf(cfg.p - 1.0);
            let mut weights = Array1::from_elem(n, eps_weight);
            for i in 0..n {
                if x_k[i].abs() > ZERO_MAG {
                    weights[i] = x_k[i].abs().powf(cfg.p - 1.0);
                }
            }
            let fixed: Vec<usize> = (0..n).filter(|&i| !weights[i].is_finite()).collect();
            for &i in &fixed {
                weights[i] = 1.0;
            }
            let ball = WeightedL1Ball::new(weights, rk, fixed)?;
            Ok((ball, step, Branch::P2, Some(eps)))
        }
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

/// Runs the iteratively reweighted l1-ball loop from a feasible `x0`.
pub fn ir1b_solve(
    obj: &dyn SmoothObjective,
    cfg: &SolverConfig,
    x0: &Array1<f64>,
) -> Result<SolveReport> {
    cfg.validate()?;
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            context: "ir1b_solve x0",
            expected: obj.dim(),
            got: x0.len(),
        });
    }
    let s0 = lp_norm_p(x0, cfg.p)?;
    if s0 > cfg.r + cfg.boundary_tol {
        return Err(Error::Infeasible(format!(
            "x0 has ||x||_p^p = {s0} > r = {}",
            cfg.r
        )));
    }
    let beta = cfg.beta_factor * obj.lipschitz();
    check_finite("beta", beta)?;

    let mut x = x0.clone();
    let mut trace = Vec::new();
    let mut lambda_final = 0.0;
    let mut status = SolveStatus::MaxIterReached;

    for _ in 0..cfg.max_iter {
        let grad = obj.gradient(&x);
        for &g in grad.iter() {
            check_finite("gradient", g)?;
        }
        let (ball, step, branch, eps) = build_subproblem(&x, &grad, beta, cfg)?;
        let x_next = project_weighted_l1(&step, &ball)?;
        let lambda = multiplier_estimate(&x, &x_next, &grad, beta, &ball, cfg.p)?;
        let displacement = {
            let d = &x_next - &x;
            d.dot(&d).sqrt()
        };
        let objective = obj.value(&x_next);
        check_finite("objective", objective)?;
        let pinned = ball.fixed_zero.len().saturating_sub(zero_set(&x).len());
        trace.push(TraceRecord {
            objective,
            displacement,
            lp_norm: Some(lp_norm_p(&x_next, cfg.p)?),
            branch: Some(branch),
            epsilon: eps,
            lambda: Some(lambda),
            pinned,
        });
        lambda_final = lambda;
        x = x_next;
        if displacement <= cfg.tol {
            status = SolveStatus::Converged;
            break;
        }
    }

    Ok(SolveReport {
        x_final: x,
        lambda_final,
        status,
        trace,
    })
}

/// Iterative hard thresholding: projected gradient onto the l0 ball.
pub fn iht_solve(
    obj: &dyn SmoothObjective,
    sparsity_k: usize,
    beta_factor: f64,
    tol: f64,
    max_iter: usize,
    x0: &Array1<f64>,
) -> Result<SolveReport> {
    if sparsity_k == 0 || sparsity_k > obj.dim() {
        return Err(Error::InvalidParameter {
            name: "sparsity_k",
            constraint: "must satisfy 1 <= k <= n",
        });
    }
    projected_gradient_loop(obj, beta_factor, tol, max_iter, x0, |v| {
        hard_threshold(v, sparsity_k)
    })
}

/// Gradient projection onto the l1 ball (the p = 1 baseline).
pub fn gpm_solve(
    obj: &dyn SmoothObjective,
    radius: f64,
    beta_factor: f64,
    tol: f64,
    max_iter: usize,
    x0: &Array1<f64>,
) -> Result<SolveReport> {
    if radius <= 0.0 || radius.is_nan() {
        return Err(Error::InvalidParameter {
            name: "radius",
            constraint: "must be positive",
        });
    }
    projected_gradient_loop(obj, beta_factor, tol, max_iter, x0, |v| {
        project_l1(v, radius)
    })
}

fn projected_gradient_loop<P>(
    obj: &dyn SmoothObjective,
    beta_factor: f64,
    tol: f64,
    max_iter: usize,
    x0: &Array1<f64>,
    project: P,
) -> Result<SolveReport>
where
    P: Fn(&Array1<f64>) -> Result<Array1<f64>>,
{
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            context: "baseline x0",
            expected: obj.dim(),
            got: x0.len(),
        });
    }
    let beta = beta_factor * obj.lipschitz();
    check_finite("beta", beta)?;
    let mut x = project(x0)?;
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxIterReached;
    for _ in 0..max_iter {
        let grad = obj.gradient(&x);
        for &g in grad.iter() {
            check_finite("gradient", g)?;
        }
        let x_next = project(&(&x - &(&grad / beta)))?;
        let displacement = {
            let d = &x_next - &x;
            d.dot(&d).sqrt()
        };
        let objective = obj.value(&x_next);
        check_finite("objective", objective)?;
        trace.push(TraceRecord {
            objective,
            displacement,
            lp_norm: None,
            branch: None,
            epsilon: None,
            lambda: None,
            pinned: 0,
        });
        x = x_next;
        if displacement <= tol {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(SolveReport {
        x_final: x,
        lambda_final: 0.0,
        status,
        trace,
    })
}

/// Feasible starting point for the recovery experiments:
/// `x0_i = 0.9 (d nu_i / ||nu||_1)^(1/p)` with `nu` uniform on [0,1)^n,
/// so `||x0||_p^p = 0.9^p d` exactly.
pub fn default_init_recovery<R: Rng>(n: usize, d: usize, p: f64, rng: &mut R) -> Array1<f64> {
    assert!(n >= 1 && d >= 1 && p > 0.0 && p < 1.0);
    loop {
        let nu: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let sum: f64 = nu.iter().sum();
        if sum == 0.0 {
            continue;
        }
        return Array1::from_iter(
            nu.into_iter()
                .map(|v| 0.9 * (d as f64 * v / sum).powf(1.0 / p)),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{least_squares_objective, LeastSquaresData};
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quadratic_distance(a: Array1<f64>) -> impl SmoothObjective {
        let n = a.len();
        least_squares_objective(LeastSquaresData {
            matrix: Array2::eye(n),
            rhs: a,
        })
        .unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        assert_eq!(lp_norm_p(&Array1::zeros(3), 0.5).unwrap(), 0.0);
        assert!((lp_norm_p(&array![1.0, -1.0], 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((lp_norm_p(&array![0.25], 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(lp_norm_p(&array![1.0], 1.5).is_err());
    }

    #[test]
    fn classify_examples() {
        let cfg = SolverConfig::new(0.5, 1.0);
        // ||x||^p = r exactly
        assert_eq!(
            classify_iterate(&array![1.0], &cfg).unwrap(),
            IterateClass::Boundary
        );
        let cfg2 = SolverConfig::new(0.5, 2.0);
        assert_eq!(
            classify_iterate(&array![1.0], &cfg2).unwrap(),
            IterateClass::Interior
        );
        // within boundary_tol of the boundary
        let x = array![(1.0f64 - 1e-9) * (1.0 - 1e-9)];
        assert_eq!(
            classify_iterate(&x, &cfg).unwrap(),
            IterateClass::Boundary
        );
        assert!(classify_iterate(&array![4.0], &cfg).is_err());
    }

    #[test]
    fn epsilon_k_hand_values() {
        let mut cfg = SolverConfig::new(0.5, 2.0);
        cfg.c = 0.95;
        // residual 1, |A| = 2 -> 0.95 (1/3)^2 = 0.95/9
        let eps = epsilon_k(&array![1.0, 0.0, 0.0], &cfg).unwrap();
        assert!((eps - 0.95 / 9.0).abs() < 1e-15);
        // boundary point -> 0
        let cfg_b = SolverConfig::new(0.5, 1.0);
        assert_eq!(epsilon_k(&array![1.0], &cfg_b).unwrap(), 0.0);
        // dense x, residual 1: |A| = 0 -> 0.95 * 1^2
        let mut cfg_d = SolverConfig::new(0.5, 2.0);
        cfg_d.c = 0.95;
        let x = array![0.25, 0.25]; // ||x||^p = 1
        let eps = epsilon_k(&x, &cfg_d).unwrap();
        assert!((eps - 0.95).abs() < 1e-12);
    }

    #[test]
    fn radius_k_hand_value_and_lower_bound() {
        let cfg = SolverConfig::new(0.5, 2.0);
        let x = array![1.0, 0.0, 0.0];
        let eps = epsilon_k(&x, &cfg).unwrap();
        let rk = radius_k(&x, eps, &cfg).unwrap();
        let expected = 2.0 * (2.0 - 0.5 - 2.0 * (0.95f64 / 9.0).sqrt());
        assert!((rk - expected).abs() < 1e-12);
        // lower bound on random feasible points
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..20);
            let mut x = Array1::zeros(n);
            for i in 0..n {
                if rng.gen_bool(0.6) {
                    x[i] = rng.gen_range(-1.0..1.0);
                }
            }
            let s = lp_norm_p(&x, cfg.p).unwrap();
            if s >= cfg.r {
                continue;
            }
            let eps = epsilon_k(&x, &cfg).unwrap();
            let rk = radius_k(&x, eps, &cfg).unwrap();
            let bound = (1.0 - cfg.c.powf(cfg.p)) / cfg.p * (cfg.r - s);
            assert!(rk > bound && bound > 0.0);
        }
    }

    #[test]
    fn build_subproblem_branches() {
        // boundary: weights on support, zeros pinned
        let cfg = SolverConfig::new(0.5, 1.0);
        let x = array![1.0, 0.0];
        let (ball, step, branch, eps) =
            build_subproblem(&x, &Array1::zeros(2), 1.1, &cfg).unwrap();
        assert_eq!(branch, Branch::P1);
        assert_eq!(eps, None);
        assert_eq!(ball.fixed_zero, vec![1]);
        assert!((ball.weights[0] - 1.0).abs() < 1e-15);
        assert!((ball.radius - 1.0).abs() < 1e-15);
        assert_eq!(step, x);

        // interior: eps weights on the zero set
        let cfg = SolverConfig::new(0.5, 2.0);
        let x = array![1.0, 0.0, 0.0];
        let (ball, _, branch, eps) = build_subproblem(&x, &Array1::zeros(3), 1.1, &cfg).unwrap();
        assert_eq!(branch, Branch::P2);
        let eps = eps.unwrap();
        assert!((eps - 0.95 / 9.0).abs() < 1e-15);
        assert!((ball.weights[0] - 1.0).abs() < 1e-15);
        assert!((ball.weights[1] - eps.powf(-0.5)).abs() < 1e-10);
        let expected_rk = 2.0 * (2.0 - 0.5 - 2.0 * (0.95f64 / 9.0).sqrt());
        assert!((ball.radius - expected_rk).abs() < 1e-12);
        assert!(ball.fixed_zero.is_empty());
    }

    #[test]
    fn zero_gradient_interior_terminates_immediately() {
        let obj = quadratic_distance(array![0.1, -0.1]);
        let cfg = SolverConfig::new(0.5, 2.0);
        let x0 = array![0.1, -0.1];
        let report = ir1b_solve(&obj, &cfg, &x0).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert_eq!(report.iterations(), 1);
        assert_eq!(report.x_final, x0);
    }

    #[test]
    fn interior_minimum_is_found() {
        let a = array![0.2, -0.1, 0.05];
        let obj = quadratic_distance(a.clone());
        let cfg = SolverConfig::new(0.5, 4.0);
        let report = ir1b_solve(&obj, &cfg, &Array1::zeros(3)).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        let d = &report.x_final - &a;
        assert!(d.dot(&d).sqrt() <= 10.0 * cfg.tol);
    }

    #[test]
    fn one_active_coordinate_boundary_solution() {
        let obj = quadratic_distance(array![2.0, 0.0]);
        let mut cfg = SolverConfig::new(0.5, 1.0);
        cfg.tol = 1e-8;
        let report = ir1b_solve(&obj, &cfg, &array![0.25, 0.0]).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!((report.x_final[0] - 1.0).abs() < 1e-6);
        assert!(report.x_final[1].abs() <= ZERO_MAG);
        let s = lp_norm_p(&report.x_final, 0.5).unwrap();
        assert!((s - 1.0).abs() < 1e-6);
        assert!((report.lambda_final - 2.0).abs() < 1e-4);
    }

    #[test]
    fn trace_invariants_hold_on_random_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = crate::testutil::random_gaussian_matrix(20, 40, &mut rng);
            let y = crate::testutil::random_gaussian_vector(20, &mut rng);
            let obj = least_squares_objective(LeastSquaresData { matrix: a, rhs: y }).unwrap();
            let mut cfg = SolverConfig::new(0.5, 3.0);
            cfg.max_iter = 2000;
            let x0 = default_init_recovery(40, 3, 0.5, &mut rng);
            let report = ir1b_solve(&obj, &cfg, &x0).unwrap();
            let mut prev = f64::INFINITY;
            for rec in &report.trace {
                let s = rec.lp_norm.unwrap();
                assert!(s <= cfg.r * (1.0 + 1e-10), "feasibility violated");
                assert!(
                    rec.objective <= prev + 1e-12 * prev.abs().max(1.0),
                    "descent violated"
                );
                assert!(rec.lambda.unwrap() >= 0.0);
                prev = rec.objective;
            }
        }
    }

    #[test]
    fn zero_set_persists_on_boundary_branch() {
        let obj = quadratic_distance(array![2.0, 0.3, 0.0]);
        let mut cfg = SolverConfig::new(0.5, 1.0);
        cfg.max_iter = 500;
        let report = ir1b_solve(&obj, &cfg, &array![1.0, 0.0, 0.0]).unwrap();
        // first branch is P1 since x0 is on the boundary; zeros must persist
        assert_eq!(report.trace[0].branch, Some(Branch::P1));
        for rec in &report.trace {
            if rec.branch == Some(Branch::P1) {
                assert!(rec.lp_norm.unwrap() <= cfg.r * (1.0 + 1e-10));
            }
        }
        assert!(report.x_final[2].abs() <= ZERO_MAG);
    }

    #[test]
    fn iht_recovers_sparse_target() {
        let a = array![1.5, 0.0, -2.0];
        let obj = quadratic_distance(a.clone());
        let report = iht_solve(&obj, 2, 1.1, 1e-10, 1000, &Array1::zeros(3)).unwrap();
        for i in 0..3 {
            assert!((report.x_final[i] - a[i]).abs() < 1e-8);
        }
        let report = iht_solve(
            &quadratic_distance(array![3.0, 2.0, 1.0]),
            1,
            1.1,
            1e-10,
            1000,
            &Array1::zeros(3),
        )
        .unwrap();
        assert!((report.x_final[0] - 3.0).abs() < 1e-8);
        assert_eq!(report.x_final[1], 0.0);
        assert_eq!(report.x_final[2], 0.0);
    }

    #[test]
    fn gpm_fixed_point_is_l1_projection() {
        let a = array![2.0, -1.0, 0.5];
        let obj = quadratic_distance(a.clone());
        let report = gpm_solve(&obj, 1.0, 1.1, 1e-12, 5000, &Array1::zeros(3)).unwrap();
        let expected = project_l1(&a, 1.0).unwrap();
        for i in 0..3 {
            assert!((report.x_final[i] - expected[i]).abs() < 1e-8);
        }
        // objective non-increasing
        let mut prev = f64::INFINITY;
        for rec in &report.trace {
            assert!(rec.objective <= prev + 1e-12);
            prev = rec.objective;
        }
    }

    #[test]
    fn init_recovery_feasibility_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, d, p) in [(1usize, 1usize, 0.5f64), (16, 4, 0.5), (64, 4, 0.3)] {
            let x0 = default_init_recovery(n, d, p, &mut rng);
            let s = lp_norm_p(&x0, p).unwrap();
            assert!((s - 0.9f64.powf(p) * d as f64).abs() < 1e-10 * d as f64);
        }
    }

    #[test]
    fn rejects_infeasible_start_and_bad_config() {
        let obj = quadratic_distance(array![1.0, 1.0]);
        let cfg = SolverConfig::new(0.5, 1.0);
        assert!(ir1b_solve(&obj, &cfg, &array![4.0, 4.0]).is_err());
        let mut bad = SolverConfig::new(0.5, 1.0);
        bad.p = 1.5;
        assert!(ir1b_solve(&obj, &bad, &Array1::zeros(2)).is_err());
    }
}
