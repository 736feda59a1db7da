//! Experiment harness: synthetic sparse-recovery sweeps over the measurement
//! count, and the logistic-regression radius sweep on a CSV dataset.
//!
//! Sweeps are deterministic for a fixed master seed regardless of worker
//! count: every trial derives its own RNG seed from
//! (master seed, method, m, trial) and results are merged in task order.
//! Wall time is therefore reported to the log only, never persisted.

use crate::error::{Error, Result};
use crate::objectives::{
    least_squares_objective, logistic_objective, LeastSquaresData, LogisticData, SmoothObjective,
};
use crate::solver::{
    default_init_recovery, gpm_solve, iht_solve, ir1b_solve, SolveReport, SolverConfig,
};
use ndarray::{Array1, Array2};
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;
use std::path::Path;

/// A solver entry in a sweep: IR1B at some `p` in (0,1), or one of the
/// baselines (IHT for the l0 ball, GPM for the l1 ball).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Ir1b { p: f64 },
    Iht,
    Gpm,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ir1b { .. } => "ir1b",
            Method::Iht => "iht",
            Method::Gpm => "gpm",
        }
    }

    /// Ball exponent used for reporting: p for IR1B, 0 for IHT, 1 for GPM.
    pub fn p_value(&self) -> f64 {
        match self {
            Method::Ir1b { p } => *p,
            Method::Iht => 0.0,
            Method::Gpm => 1.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ir1b { p } => write!(f, "ir1b(p={p})"),
            Method::Iht => write!(f, "iht"),
            Method::Gpm => write!(f, "gpm"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecoverySpec {
    /// Ambient dimension.
    pub n: usize,
    /// True sparsity.
    pub d: usize,
    pub m_grid: Vec<usize>,
    pub noise_std: f64,
    pub methods: Vec<Method>,
    pub trials: usize,
    /// Strict relative-l2-error bound declaring a success.
    pub success_threshold: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl RecoverySpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                constraint: "must be at least 1",
            });
        }
        if self.success_threshold <= 0.0 || self.success_threshold.is_nan() {
            return Err(Error::InvalidParameter {
                name: "success_threshold",
                constraint: "must be positive",
            });
        }
        if self.d > self.n {
            return Err(Error::InvalidParameter {
                name: "d",
                constraint: "must not exceed n",
            });
        }
        Ok(())
    }
}

/// One long-format result row, matching the persisted CSV/JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: String,
    pub p: f64,
    /// Sweep parameter: measurement count m or ball radius r.
    pub param: f64,
    pub metric: String,
    pub value: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Draws a recovery instance: `x_true` has `d` nonzeros of value +/-1 at
/// uniformly random positions, `A` is m x n standard Gaussian, and
/// `y = A x_true + noise`.
pub fn gen_recovery_instance<R: Rng>(
    n: usize,
    m: usize,
    d: usize,
    noise_std: f64,
    rng: &mut R,
) -> Result<(Array2<f64>, Array1<f64>, Array1<f64>)> {
    if d > n {
        return Err(Error::InvalidParameter {
            name: "d",
            constraint: "must not exceed n",
        });
    }
    let mut x_true = Array1::zeros(n);
    if d > 0 {
        for i in sample(rng, n, d) {
            x_true[i] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
    }
    let a = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let mut y = a.dot(&x_true);
    if noise_std > 0.0 {
        for yi in y.iter_mut() {
            *yi += noise_std * rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
    }
    Ok((a, y, x_true))
}

/// Success is a relative l2 error strictly below the threshold.
pub fn recovery_success(
    x_star: &Array1<f64>,
    x_true: &Array1<f64>,
    threshold: f64,
) -> Result<bool> {
    let norm_true = x_true.dot(x_true).sqrt();
    if norm_true == 0.0 {
        return Err(Error::InvalidParameter {
            name: "x_true",
            constraint: "must be nonzero",
        });
    }
    let d = x_star - x_true;
    Ok(d.dot(&d).sqrt() / norm_true < threshold)
}

// SplitMix64 step, used to derive independent per-trial seeds.
fn mix_seed(words: &[u64]) -> u64 {
    let mut z = 0x9e3779b97f4a7c15u64;
    for &w in words {
        z = z.wrapping_add(w).wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

fn run_recovery_trial(spec: &RecoverySpec, method: Method, m: usize, trial: usize) -> (bool, usize) {
    let seed = mix_seed(&[
        spec.seed,
        method.name().len() as u64 ^ (method.p_value().to_bits()),
        m as u64,
        trial as u64,
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result: Result<(bool, usize)> = (|| {
        let (a, y, x_true) =
            gen_recovery_instance(spec.n, m, spec.d, spec.noise_std, &mut rng)?;
        let obj = least_squares_objective(LeastSquaresData { matrix: a, rhs: y })?;
        let report: SolveReport = match method {
            Method::Ir1b { p } => {
                let mut cfg = SolverConfig::new(p, spec.d as f64);
                cfg.max_iter = spec.max_iter;
                cfg.seed = seed;
                let x0 = default_init_recovery(spec.n, spec.d, p, &mut rng);
                ir1b_solve(&obj, &cfg, &x0)?
            }
            Method::Iht => iht_solve(
                &obj,
                spec.d,
                1.1,
                1e-5,
                spec.max_iter,
                &Array1::zeros(spec.n),
            )?,
            Method::Gpm => gpm_solve(
                &obj,
                spec.d as f64,
                1.1,
                1e-5,
                spec.max_iter,
                &Array1::zeros(spec.n),
            )?,
        };
        let success = recovery_success(&report.x_final, &x_true, spec.success_threshold)?;
        Ok((success, report.iterations()))
    })();
    // per-trial failures count as unsuccessful rather than aborting the sweep
    result.unwrap_or((false, 0))
}

/// Runs the measurement-count sweep. Trials execute in parallel on the
/// ambient rayon pool; output is identical for any worker count.
pub fn recovery_sweep(spec: &RecoverySpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for &method in &spec.methods {
        for &m in &spec.m_grid {
            for trial in 0..spec.trials {
                tasks.push((method, m, trial));
            }
        }
    }
    let outcomes: Vec<(bool, usize)> = tasks
        .par_iter()
        .map(|&(method, m, trial)| run_recovery_trial(spec, method, m, trial))
        .collect();

    let mut rows = Vec::new();
    let mut idx = 0;
    for &method in &spec.methods {
        for &m in &spec.m_grid {
            let chunk = &outcomes[idx..idx + spec.trials];
            idx += spec.trials;
            let successes = chunk.iter().filter(|(ok, _)| *ok).count();
            let iters: usize = chunk.iter().map(|(_, it)| it).sum();
            rows.push(SweepRow {
                method: method.name().to_string(),
                p: method.p_value(),
                param: m as f64,
                metric: "success_rate".to_string(),
                value: successes as f64 / spec.trials as f64,
                trials: spec.trials as u64,
                seed: spec.seed,
            });
            rows.push(SweepRow {
                method: method.name().to_string(),
                p: method.p_value(),
                param: m as f64,
                metric: "mean_iterations".to_string(),
                value: iters as f64 / spec.trials as f64,
                trials: spec.trials as u64,
                seed: spec.seed,
            });
        }
    }
    Ok(SweepResult { rows })
}

/// Loads a numeric CSV with the class label in the last column ({0,1} or
/// {-1,+1}); an optional header row is skipped. Features are standardized
/// per column to zero mean and unit variance (constant columns become zero).
pub fn load_csv_dataset<P: AsRef<Path>>(path: P) -> Result<LogisticData> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                match width {
                    None => width = Some(values.len()),
                    Some(w) if w != values.len() => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            message: format!("expected {w} fields, got {}", values.len()),
                        })
                    }
                    _ => {}
                }
                rows.push(values);
            }
            Err(e) => {
                // only the first line may be a non-numeric header
                if lineno == 0 && rows.is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: e.to_string(),
                });
            }
        }
    }
    let width = width.ok_or(Error::Parse {
        line: 0,
        message: "no data rows".to_string(),
    })?;
    if width < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "need at least one feature column and a label column".to_string(),
        });
    }
    let m = rows.len();
    let n = width - 1;
    let mut features = Array2::zeros((m, n));
    let mut labels = Array1::zeros(m);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..n {
            features[[i, j]] = row[j];
        }
        labels[i] = match row[n] {
            1.0 => 1.0,
            v if v == 0.0 || v == -1.0 => -1.0,
            v => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("non-binary label {v}"),
                })
            }
        };
    }
    // standardize columns
    for j in 0..n {
        let mut col = features.column_mut(j);
        let mean = col.sum() / m as f64;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / m as f64;
        let std = var.sqrt();
        if std > 0.0 {
            col.mapv_inplace(|v| (v - mean) / std);
        } else {
            col.fill(0.0);
        }
    }
    Ok(LogisticData { features, labels })
}

/// Uniform random split without replacement; the test side gets
/// `ceil(m * test_frac)` rows.
pub fn train_test_split<R: Rng>(
    data: &LogisticData,
    test_frac: f64,
    rng: &mut R,
) -> Result<(LogisticData, LogisticData)> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::InvalidParameter {
            name: "test_frac",
            constraint: "must lie in (0,1)",
        });
    }
    let m = data.features.nrows();
    let test_size = ((m as f64) * test_frac).ceil() as usize;
    if test_size == 0 || test_size >= m {
        return Err(Error::InvalidParameter {
            name: "test_frac",
            constraint: "split leaves an empty train or test set",
        });
    }
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let take = |idx: &[usize]| -> LogisticData {
        let n = data.features.ncols();
        let mut features = Array2::zeros((idx.len(), n));
        let mut labels = Array1::zeros(idx.len());
        for (row, &i) in idx.iter().enumerate() {
            features.row_mut(row).assign(&data.features.row(i));
            labels[row] = data.labels[i];
        }
        LogisticData { features, labels }
    };
    Ok((take(&order[test_size..]), take(&order[..test_size])))
}

/// Fraction of labels matched by the 0.5-sigmoid-threshold prediction,
/// i.e. predict +1 iff `theta^T x >= 0`.
pub fn predict_accuracy(theta: &Array1<f64>, test: &LogisticData) -> Result<f64> {
    let m = test.features.nrows();
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "test",
            constraint: "must be nonempty",
        });
    }
    if theta.len() != test.features.ncols() {
        return Err(Error::DimensionMismatch {
            context: "predict_accuracy theta",
            expected: test.features.ncols(),
            got: theta.len(),
        });
    }
    let scores = test.features.dot(theta);
    let correct = scores
        .iter()
        .zip(test.labels.iter())
        .filter(|(&z, &s)| if z >= 0.0 { s == 1.0 } else { s == -1.0 })
        .count();
    Ok(correct as f64 / m as f64)
}

/// Radius sweep for lp-ball constrained logistic regression from `theta = 0`.
/// `p = 1` entries run the GPM baseline; everything else runs IR1B.
pub fn logistic_sweep(
    data: &LogisticData,
    r_grid: &[f64],
    p_list: &[f64],
    cfg: &SolverConfig,
    test_frac: f64,
) -> Result<SweepResult> {
    if r_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "r_grid",
            constraint: "must be nonempty",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (train, test) = train_test_split(data, test_frac, &mut rng)?;
    let obj = logistic_objective(train)?;
    let n = obj.dim();

    let mut tasks = Vec::new();
    for &p in p_list {
        for &r in r_grid {
            tasks.push((p, r));
        }
    }
    let accuracies: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(p, r)| {
            let theta0 = Array1::zeros(n);
            let report = if p == 1.0 {
                gpm_solve(&obj, r, cfg.beta_factor, cfg.tol, cfg.max_iter, &theta0)?
            } else {
                let mut c = cfg.clone();
                c.p = p;
                c.r = r;
                ir1b_solve(&obj, &c, &theta0)?
            };
            predict_accuracy(&report.x_final, &test)
        })
        .collect();

    let mut rows = Vec::new();
    for ((p, r), acc) in tasks.into_iter().zip(accuracies) {
        rows.push(SweepRow {
            method: if p == 1.0 { "gpm" } else { "ir1b" }.to_string(),
            p,
            param: r,
            metric: "test_accuracy".to_string(),
            value: acc?,
            trials: 1,
            seed: cfg.seed,
        });
    }
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter {
                name: "format",
                constraint: "must be `csv` or `json`",
            }),
        }
    }
}

/// Writes the result table. Floats use Rust's shortest round-trip formatting,
/// so a read-back reproduces the values exactly; lines end with LF.
pub fn persist_results<P: AsRef<Path>>(
    result: &SweepResult,
    path: P,
    format: OutputFormat,
) -> Result<()> {
    let mut out: Vec<u8> = Vec::new();
    match format {
        OutputFormat::Csv => {
            out.extend_from_slice(b"method,p,param,metric,value,trials,seed\n");
            for row in &result.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    row.method, row.p, row.param, row.metric, row.value, row.trials, row.seed
                )?;
            }
        }
        OutputFormat::Json => {
            out = serde_json::to_vec_pretty(&result.rows).expect("serializable rows");
            out.push(b'\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads back a table written by [`persist_results`].
pub fn load_results<P: AsRef<Path>>(path: P, format: OutputFormat) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path)?;
    match format {
        OutputFormat::Json => {
            let rows: Vec<SweepRow> = serde_json::from_str(&text).map_err(|e| Error::Parse {
                line: 0,
                message: e.to_string(),
            })?;
            Ok(SweepResult { rows })
        }
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for (lineno, line) in text.lines().enumerate() {
                if lineno == 0 || line.is_empty() {
                    continue;
                }
                let f: Vec<&str> = line.split(',').collect();
                if f.len() != 7 {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("expected 7 fields, got {}", f.len()),
                    });
                }
                let parse_f64 = |s: &str| -> Result<f64> {
                    s.parse().map_err(|e: std::num::ParseFloatError| Error::Parse {
                        line: lineno + 1,
                        message: e.to_string(),
                    })
                };
                let parse_u64 = |s: &str| -> Result<u64> {
                    s.parse().map_err(|e: std::num::ParseIntError| Error::Parse {
                        line: lineno + 1,
                        message: e.to_string(),
                    })
                };
                rows.push(SweepRow {
                    method: f[0].to_string(),
                    p: parse_f64(f[1])?,
                    param: parse_f64(f[2])?,
                    metric: f[3].to_string(),
                    value: parse_f64(f[4])?,
                    trials: parse_u64(f[5])?,
                    seed: parse_u64(f[6])?,
                });
            }
            Ok(SweepResult { rows })
        }
    }
}
