//! Minimization of smooth functions over nonconvex lp balls (0 < p < 1) by
//! iteratively reweighted l1-ball projections, with IHT and l1
//! projected-gradient baselines, first-order stationarity certification, and
//! an experiment harness for sparse recovery and logistic regression.
//!
//! Entry points:
//! - [`solver::ir1b_solve`] with a [`solver::SolverConfig`] and a feasible start
//! - [`projection::project_weighted_l1`] for the subproblem geometry
//! - [`optimality::stationarity_report`] to certify a candidate point
//! - [`experiments::recovery_sweep`] / [`experiments::logistic_sweep`]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod objectives;
pub mod optimality;
pub mod projection;
pub mod solver;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};
