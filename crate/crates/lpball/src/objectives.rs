//! Smooth objectives with analytic gradients and Lipschitz-constant bounds.
//!
//! Both objectives expose the same [`SmoothObjective`] interface consumed by
//! every solver: `value`, `gradient`, and an upper bound on the Lipschitz
//! constant of the gradient obtained by power iteration on the Gram matrix.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};

/// Power-iteration defaults: deterministic all-ones start, relative
/// Rayleigh-quotient tolerance, iteration cap.
pub const POWER_ITER_TOL: f64 = 1e-8;
pub const POWER_ITER_MAX: usize = 5000;

/// A smooth objective with gradient and a Lipschitz bound for the gradient.
pub trait SmoothObjective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Array1<f64>) -> f64;
    fn gradient(&self, x: &Array1<f64>) -> Array1<f64>;
    /// Upper bound on the Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;
}

/// Largest eigenvalue of a symmetric PSD operator given as `v -> M v`.
///
/// Starts from the normalized all-ones vector and stops when the Rayleigh
/// quotient stabilizes to relative `tol`. Returns the estimate and whether it
/// converged within `max_iter`.
pub fn power_iteration_lambda_max<F>(
    apply: F,
    n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, bool)>
where
    F: Fn(&Array1<f64>) -> Array1<f64>,
{
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            constraint: "must be positive",
        });
    }
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = apply(&v);
        let new_lambda = v.dot(&w);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return Ok((0.0, true));
        }
        v = w / norm;
        if (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300) {
            return Ok((new_lambda, true));
        }
        lambda = new_lambda;
    }
    Ok((lambda, false))
}

/// Least-squares data `1/2 ||A x - y||^2`.
#[derive(Debug, Clone)]
pub struct LeastSquaresData {
    pub matrix: Array2<f64>,
    pub rhs: Array1<f64>,
}

pub struct LeastSquares {
    data: LeastSquaresData,
    lipschitz: f64,
}

/// Builds the least-squares objective; `lipschitz` is `lambda_max(A^T A)`.
pub fn least_squares_objective(data: LeastSquaresData) -> Result<LeastSquares> {
    let (m, n) = data.matrix.dim();
    if data.rhs.len() != m {
        return Err(Error::DimensionMismatch {
            context: "least squares rhs",
            expected: m,
            got: data.rhs.len(),
        });
    }
    let a = &data.matrix;
    let (lipschitz, _) = power_iteration_lambda_max(
        |v| a.t().dot(&a.dot(v)),
        n,
        POWER_ITER_TOL,
        POWER_ITER_MAX,
    )?;
    Ok(LeastSquares { data, lipschitz })
}

impl SmoothObjective for LeastSquares {
    fn dim(&self) -> usize {
        self.data.matrix.ncols()
    }

    fn value(&self, x: &Array1<f64>) -> f64 {
        let r = self.data.matrix.dot(x) - &self.data.rhs;
        0.5 * r.dot(&r)
    }

    fn gradient(&self, x: &Array1<f64>) -> Array1<f64> {
        let r = self.data.matrix.dot(x) - &self.data.rhs;
        self.data.matrix.t().dot(&r)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Logistic-regression data: feature rows and +/-1 labels.
#[derive(Debug, Clone)]
pub struct LogisticData {
    pub features: Array2<f64>,
    pub labels: Array1<f64>,
}

impl LogisticData {
    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.features.nrows() {
            return Err(Error::DimensionMismatch {
                context: "logistic labels",
                expected: self.features.nrows(),
                got: self.labels.len(),
            });
        }
        if self.labels.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::InvalidParameter {
                name: "labels",
                constraint: "must be -1 or +1",
            });
        }
        Ok(())
    }
}

pub struct Logistic {
    data: LogisticData,
    lipschitz: f64,
}

/// Builds the logistic loss `sum_i log(1 + exp(-s_i theta^T x_i))`;
/// `lipschitz` is `0.25 lambda_max(X^T X)`.
pub fn logistic_objective(data: LogisticData) -> Result<Logistic> {
    data.validate()?;
    let x = &data.features;
    let n = x.ncols();
    let (lam, _) = power_iteration_lambda_max(
        |v| x.t().dot(&x.dot(v)),
        n,
        POWER_ITER_TOL,
        POWER_ITER_MAX,
    )?;
    Ok(Logistic {
        data,
        lipschitz: 0.25 * lam,
    })
}

// log(1 + exp(-z)) without overflow for large |z|.
fn log1p_exp_neg(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl SmoothObjective for Logistic {
    fn dim(&self) -> usize {
        self.data.features.ncols()
    }

    fn value(&self, theta: &Array1<f64>) -> f64 {
        let scores = self.data.features.dot(theta);
        scores
            .iter()
            .zip(self.data.labels.iter())
            .map(|(&z, &s)| log1p_exp_neg(s * z))
            .sum()
    }

    fn gradient(&self, theta: &Array1<f64>) -> Array1<f64> {
        let scores = self.data.features.dot(theta);
        // d/dtheta log(1+exp(-s z)) = -s sigmoid(-s z) x
        let coeff = Array1::from_iter(
            scores
                .iter()
                .zip(self.data.labels.iter())
                .map(|(&z, &s)| -s * sigmoid(-s * z)),
        );
        self.data.features.t().dot(&coeff)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}
