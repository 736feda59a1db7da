//! Command-line front end: solve, project, certify, and the two experiment
//! sweeps, with a flat key=value config file and reproducible seeds.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 runtime or solver
//! failure.

use crate::error::{Error, Result};
use crate::experiments::{
    load_csv_dataset, logistic_sweep, persist_results, recovery_sweep, Method, OutputFormat,
    RecoverySpec,
};
use crate::objectives::{
    least_squares_objective, logistic_objective, LeastSquaresData, SmoothObjective,
};
use crate::optimality::stationarity_report;
use crate::projection::{project_l1, project_weighted_l1, WeightedL1Ball};
use crate::solver::{ir1b_solve, SolverConfig};
use clap::{Args, Parser, Subcommand};
use ndarray::{Array1, Array2};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "lpball", version, about = "lp-ball constrained smooth minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverOpts {
    /// Ball exponent, in (0,1)
    #[arg(long)]
    p: Option<f64>,
    /// Ball radius
    #[arg(long)]
    r: Option<f64>,
    /// Interior perturbation factor, in (0,1)
    #[arg(long)]
    c: Option<f64>,
    /// Stepsize control: beta = beta_factor * L
    #[arg(long = "beta-factor")]
    beta_factor: Option<f64>,
    /// Displacement stopping tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Boundary detector tolerance
    #[arg(long = "boundary-tol")]
    boundary_tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key=value config file; CLI flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimize an objective over the lp ball with IR1B
    Solve {
        #[command(flatten)]
        opts: SolverOpts,
        /// Objective family: `ls` or `logistic`
        #[arg(long)]
        objective: String,
        /// Sensing matrix CSV (ls)
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Measurement vector CSV (ls)
        #[arg(long)]
        rhs: Option<PathBuf>,
        /// Labeled dataset CSV (logistic)
        #[arg(long)]
        data: Option<PathBuf>,
        /// Starting point CSV (default: zero vector)
        #[arg(long)]
        x0: Option<PathBuf>,
        /// Write the final iterate here, one value per line
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project a vector onto a (weighted) l1 ball
    Project {
        /// Input vector CSV
        #[arg(long)]
        input: PathBuf,
        /// Optional weight vector CSV (default: all ones)
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-order stationarity certificate for a candidate point
    Certify {
        #[command(flatten)]
        opts: SolverOpts,
        #[arg(long)]
        objective: String,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        rhs: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Candidate point CSV
        #[arg(long)]
        point: PathBuf,
        /// Write the certificate as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparse-recovery success-rate sweep over the measurement count
    RecoverSweep {
        #[command(flatten)]
        opts: SolverOpts,
        /// Ambient dimension
        #[arg(long, default_value_t = 1024)]
        n: usize,
        /// True sparsity
        #[arg(long, default_value_t = 25)]
        d: usize,
        /// Comma-separated measurement counts
        #[arg(long)]
        m: String,
        /// Comma-separated methods: p values in (0,1), `l0`, `l1`
        #[arg(long, default_value = "0.5,l0,l1")]
        methods: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long = "noise-std", default_value_t = 1e-2)]
        noise_std: f64,
        /// Success threshold on the relative l2 error
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Logistic-regression test-accuracy sweep over the ball radius
    LogisticSweep {
        #[command(flatten)]
        opts: SolverOpts,
        /// Labeled dataset CSV, label in the last column
        #[arg(long)]
        data: PathBuf,
        /// Radii: `lo:hi` (inclusive, step 1) or a comma-separated list
        #[arg(long = "r-grid", default_value = "2:35")]
        r_grid: String,
        /// Comma-separated p values (1 runs the GPM baseline)
        #[arg(long, default_value = "0.5,1")]
        p_list: String,
        #[arg(long = "test-frac", default_value_t = 0.4)]
        test_frac: f64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

/// Parsed key=value config file. CLI flags override these values.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, f64>,
}

const CONFIG_KEYS: &[&str] = &[
    "p",
    "r",
    "c",
    "beta_factor",
    "tol",
    "boundary_tol",
    "max_iter",
    "seed",
    "threads",
    "n",
    "d",
    "trials",
    "noise_std",
    "threshold",
    "test_frac",
];

/// Parses a flat `key = value` file (`#` starts a comment). Unknown keys are
/// fatal and listed in the error.
pub fn load_config<P: AsRef<Path>>(path: P) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut values = HashMap::new();
    let mut unknown = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            unknown.push(key);
            continue;
        }
        let value: f64 = value.trim().parse().map_err(|e| Error::Parse {
            line: lineno + 1,
            message: format!("key `{key}`: {e}"),
        })?;
        values.insert(key, value);
    }
    if !unknown.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: format!("unknown config keys: {}", unknown.join(", ")),
        });
    }
    Ok(FileConfig { values })
}

impl FileConfig {
    fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

/// Resolves defaults < config file < CLI flags into a validated SolverConfig.
fn resolve_solver_config(opts: &SolverOpts, file: &FileConfig) -> Result<SolverConfig> {
    let p = opts.p.or(file.get("p")).unwrap_or(0.5);
    let r = opts.r.or(file.get("r")).unwrap_or(1.0);
    let mut cfg = SolverConfig::new(p, r);
    if let Some(c) = opts.c.or(file.get("c")) {
        cfg.c = c;
    }
    if let Some(b) = opts.beta_factor.or(file.get("beta_factor")) {
        cfg.beta_factor = b;
    }
    if let Some(t) = opts.tol.or(file.get("tol")) {
        cfg.tol = t;
    }
    if let Some(t) = opts.boundary_tol.or(file.get("boundary_tol")) {
        cfg.boundary_tol = t;
    }
    if let Some(m) = opts.max_iter.or(file.get("max_iter").map(|v| v as usize)) {
        cfg.max_iter = m;
    }
    if let Some(s) = opts.seed.or(file.get("seed").map(|v| v as u64)) {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_vector_csv(path: &Path) -> Result<Array1<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        for field in line.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            values.push(field.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: e.to_string(),
            })?);
        }
    }
    Ok(Array1::from(values))
}

fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: "ragged matrix rows".to_string(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "empty matrix".to_string(),
        });
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(Array2::from_shape_fn((m, n), |(i, j)| rows[i][j]))
}

fn write_vector_csv(path: &Path, x: &Array1<f64>) -> Result<()> {
    let mut out = String::new();
    for v in x.iter() {
        out.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn build_objective(
    objective: &str,
    matrix: &Option<PathBuf>,
    rhs: &Option<PathBuf>,
    data: &Option<PathBuf>,
) -> Result<Box<dyn SmoothObjective>> {
    match objective {
        "ls" => {
            let matrix = matrix.as_ref().ok_or(Error::InvalidParameter {
                name: "matrix",
                constraint: "required for the ls objective",
            })?;
            let rhs = rhs.as_ref().ok_or(Error::InvalidParameter {
                name: "rhs",
                constraint: "required for the ls objective",
            })?;
            let obj = least_squares_objective(LeastSquaresData {
                matrix: read_matrix_csv(matrix)?,
                rhs: read_vector_csv(rhs)?,
            })?;
            Ok(Box::new(obj))
        }
        "logistic" => {
            let data = data.as_ref().ok_or(Error::InvalidParameter {
                name: "data",
                constraint: "required for the logistic objective",
            })?;
            let obj = logistic_objective(load_csv_dataset(data)?)?;
            Ok(Box::new(obj))
        }
        _ => Err(Error::InvalidParameter {
            name: "objective",
            constraint: "must be `ls` or `logistic`",
        }),
    }
}

fn parse_usize_list(s: &str, name: &'static str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<usize>().map_err(|_| Error::InvalidParameter {
                name,
                constraint: "must be a comma-separated list of positive integers",
            })
        })
        .collect()
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    s.split(',')
        .map(|t| match t.trim() {
            "l0" | "L0" => Ok(Method::Iht),
            "l1" | "L1" => Ok(Method::Gpm),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::InvalidParameter {
                    name: "methods",
                    constraint: "entries must be p values in (0,1), `l0`, or `l1`",
                })?;
                if p > 0.0 && p < 1.0 {
                    Ok(Method::Ir1b { p })
                } else if p == 0.0 {
                    Ok(Method::Iht)
                } else if p == 1.0 {
                    Ok(Method::Gpm)
                } else {
                    Err(Error::InvalidParameter {
                        name: "methods",
                        constraint: "p must lie in [0,1]",
                    })
                }
            }
        })
        .collect()
}

fn parse_r_grid(s: &str) -> Result<Vec<f64>> {
    if let Some((lo, hi)) = s.split_once(':') {
        let lo: i64 = lo.trim().parse().map_err(|_| Error::InvalidParameter {
            name: "r_grid",
            constraint: "range bounds must be integers",
        })?;
        let hi: i64 = hi.trim().parse().map_err(|_| Error::InvalidParameter {
            name: "r_grid",
            constraint: "range bounds must be integers",
        })?;
        if lo > hi {
            return Err(Error::InvalidParameter {
                name: "r_grid",
                constraint: "range must be nondecreasing",
            });
        }
        Ok((lo..=hi).map(|v| v as f64).collect())
    } else {
        s.split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::InvalidParameter {
                    name: "r_grid",
                    constraint: "must be a `lo:hi` range or comma-separated numbers",
                })
            })
            .collect()
    }
}

fn parse_p_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let p: f64 = t.trim().parse().map_err(|_| Error::InvalidParameter {
                name: "p_list",
                constraint: "must be comma-separated numbers",
            })?;
            if p > 0.0 && p <= 1.0 {
                Ok(p)
            } else {
                Err(Error::InvalidParameter {
                    name: "p_list",
                    constraint: "p must lie in (0,1]",
                })
            }
        })
        .collect()
}

fn thread_count(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("LPBALL_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0) // 0 lets rayon pick the available parallelism
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parse {
            line: 0,
            message: format!("thread pool: {e}"),
        })?;
    pool.install(f)
}

fn load_file_config(opts: &SolverOpts) -> Result<FileConfig> {
    match &opts.config {
        Some(path) => load_config(path),
        None => Ok(FileConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            opts,
            objective,
            matrix,
            rhs,
            data,
            x0,
            out,
        } => {
            let file = load_file_config(&opts)?;
            let cfg = resolve_solver_config(&opts, &file)?;
            let obj = build_objective(&objective, &matrix, &rhs, &data)?;
            let x0 = match x0 {
                Some(path) => read_vector_csv(&path)?,
                None => Array1::zeros(obj.dim()),
            };
            let report = ir1b_solve(obj.as_ref(), &cfg, &x0)?;
            let cert =
                stationarity_report(&report.x_final, obj.as_ref(), cfg.p, cfg.r, cfg.boundary_tol)?;
            println!(
                "status={:?} iterations={} objective={} residual={} lambda={}",
                report.status,
                report.iterations(),
                report.trace.last().map(|t| t.objective).unwrap_or(f64::NAN),
                cert.residual,
                cert.lambda
            );
            if let Some(out) = out {
                write_vector_csv(&out, &report.x_final)?;
            }
            Ok(())
        }
        Command::Project {
            input,
            weights,
            r,
            out,
        } => {
            let v = read_vector_csv(&input)?;
            let projected = match weights {
                Some(wpath) => {
                    let w = read_vector_csv(&wpath)?;
                    let ball = WeightedL1Ball::new(w, r, Vec::new())?;
                    project_weighted_l1(&v, &ball)?
                }
                None => project_l1(&v, r)?,
            };
            let l1: f64 = projected.iter().map(|x| x.abs()).sum();
            println!("dim={} l1_norm={} radius={}", projected.len(), l1, r);
            if let Some(out) = out {
                write_vector_csv(&out, &projected)?;
            }
            Ok(())
        }
        Command::Certify {
            opts,
            objective,
            matrix,
            rhs,
            data,
            point,
            out,
        } => {
            let file = load_file_config(&opts)?;
            let cfg = resolve_solver_config(&opts, &file)?;
            let obj = build_objective(&objective, &matrix, &rhs, &data)?;
            let x = read_vector_csv(&point)?;
            let cert = stationarity_report(&x, obj.as_ref(), cfg.p, cfg.r, cfg.boundary_tol)?;
            println!(
                "case={:?} lambda={} residual={} feasibility_gap={}",
                cert.case, cert.lambda, cert.residual, cert.feasibility_gap
            );
            if let Some(out) = out {
                let json = serde_json::json!({
                    "case": format!("{:?}", cert.case),
                    "lambda": cert.lambda,
                    "residual": cert.residual,
                    "feasibility_gap": cert.feasibility_gap,
                });
                std::fs::write(out, format!("{json:#}\n"))?;
            }
            Ok(())
        }
        Command::RecoverSweep {
            opts,
            n,
            d,
            m,
            methods,
            trials,
            noise_std,
            threshold,
            threads,
            out,
            format,
        } => {
            let file = load_file_config(&opts)?;
            let spec = RecoverySpec {
                n: file.get("n").map(|v| v as usize).unwrap_or(n),
                d: file.get("d").map(|v| v as usize).unwrap_or(d),
                m_grid: parse_usize_list(&m, "m")?,
                noise_std: file.get("noise_std").unwrap_or(noise_std),
                methods: parse_methods(&methods)?,
                trials: file.get("trials").map(|v| v as usize).unwrap_or(trials),
                success_threshold: file.get("threshold").unwrap_or(threshold),
                seed: opts
                    .seed
                    .or(file.get("seed").map(|v| v as u64))
                    .unwrap_or(0),
                max_iter: opts
                    .max_iter
                    .or(file.get("max_iter").map(|v| v as usize))
                    .unwrap_or(100_000),
            };
            for method in &spec.methods {
                if let Method::Ir1b { p } = method {
                    if !(*p > 0.0 && *p < 1.0) {
                        return Err(Error::InvalidParameter {
                            name: "p",
                            constraint: "must lie in (0,1)",
                        });
                    }
                }
            }
            let format: OutputFormat = format.parse()?;
            let result = with_pool(thread_count(threads), || recovery_sweep(&spec))?;
            persist_results(&result, &out, format)?;
            println!(
                "recover-sweep: {} rows written to {}",
                result.rows.len(),
                out.display()
            );
            Ok(())
        }
        Command::LogisticSweep {
            opts,
            data,
            r_grid,
            p_list,
            test_frac,
            threads,
            out,
            format,
        } => {
            let file = load_file_config(&opts)?;
            let dataset = load_csv_dataset(&data)?;
            let grid = parse_r_grid(&r_grid)?;
            let ps = parse_p_list(&p_list)?;
            let test_frac = file.get("test_frac").unwrap_or(test_frac);
            // p/r placeholders; per-task values come from the grid
            let mut base = SolverOpts::clone(&opts);
            if base.p.is_none() {
                base.p = Some(0.5);
            }
            if base.r.is_none() {
                base.r = Some(grid[0].max(1.0));
            }
            let cfg = resolve_solver_config(&base, &file)?;
            let format: OutputFormat = format.parse()?;
            let result = with_pool(thread_count(threads), || {
                logistic_sweep(&dataset, &grid, &ps, &cfg, test_frac)
            })?;
            persist_results(&result, &out, format)?;
            println!(
                "logistic-sweep: {} rows written to {}",
                result.rows.len(),
                out.display()
            );
            Ok(())
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. } | Error::Parse { .. } | Error::DimensionMismatch { .. } => 1,
        Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => 1,
        _ => 2,
    }
}

/// Parses the arguments (the first entry is the program name) and runs the
/// selected command. Returns the process exit code.
pub fn run_cli<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful outcomes
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
