//! Experiment drivers and numerical checks of the method's guarantees.
//!
//! Every driver splits its work into independent units (a trial, a run, a
//! seed) that own an RNG stream derived from the master seed and the unit
//! index, so results do not depend on thread scheduling.

mod angles;
mod benchmark;
mod consistency;
mod residual;
mod siam;
pub mod stats;

use rand::Rng;
use thiserror::Error;

use crate::baselines::BaselineError;
use crate::linalg::Vector;
use crate::objectives::ObjectiveError;
use crate::optimizer::OptimizeError;
use crate::quadfit::QuadfitError;

pub use angles::{angle_between, cell_angles, exp1_angles, write_angles_csv, AngleRecord, Estimator, Exp1Config, EXP1_SCALES};
pub use benchmark::{
    exp2_benchmark, final_values, write_benchmark_csv, write_benchmark_summary, Algorithm, BenchmarkRun,
    Exp2Config, EXP2_FUNCTIONS,
};
pub use consistency::{
    consistency_check, curvature_error, write_consistency_csv, ConsistencyConfig,
    ConsistencyRecord, ConsistencyReport,
};
pub use residual::{
    bound_check, residual_bound, residual_exact, residual_monte_carlo, write_bound_csv,
    BoundCheckRecord, MonteCarloEstimate,
};
pub use siam::{exp3_siam, success_fraction, Exp3Config, write_siam_csv, write_siam_summary, SiamRun, SIAM_TARGET};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Fit(#[from] QuadfitError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// Uniform draw from `[−half_width, half_width]ⁿ`.
pub fn uniform_box<R: Rng + ?Sized>(rng: &mut R, n: usize, half_width: f64) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-half_width..=half_width))
}

/// Best-so-far value at evaluation count `limit` from an improvement history
/// given as `(evals, best_f)` pairs in increasing order.
pub fn best_within(history: impl IntoIterator<Item = (u64, f64)>, limit: u64) -> f64 {
    history
        .into_iter()
        .take_while(|&(e, _)| e <= limit)
        .last()
        .map_or(f64::INFINITY, |(_, f)| f)
}
