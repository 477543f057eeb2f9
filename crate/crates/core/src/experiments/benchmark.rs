//! Non-local quasi-Newton against restarted BFGS on multimodal benchmarks
//! under a shared evaluation budget.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stats::median;
use super::{best_within, uniform_box, ExperimentError};
use crate::baselines::{rbfgs_run, RbfgsConfig};
use crate::objectives::by_name;
use crate::optimizer::{nlqn_run, NlqnConfig};
use crate::output::{derive_seed, fmt_float, write_csv};

pub const EXP2_FUNCTIONS: [&str; 3] = ["levy", "salomon", "rcigar"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Nlqn,
    Rbfgs,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Nlqn, Algorithm::Rbfgs];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Nlqn => "nlqn",
            Algorithm::Rbfgs => "rbfgs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp2Config {
    pub dim: usize,
    pub runs: usize,
    pub budget: u64,
    pub functions: Vec<String>,
    /// Initial points and restarts are drawn from `[−half_width, half_width]ⁿ`.
    pub half_width: f64,
    /// Passed to [`NlqnConfig::keep_incumbent`].
    pub keep_incumbent: bool,
    pub seed: u64,
}

impl Default for Exp2Config {
    fn default() -> Self {
        Exp2Config {
            dim: 50,
            runs: 20,
            budget: 100_000,
            functions: EXP2_FUNCTIONS.iter().map(|s| s.to_string()).collect(),
            half_width: 10.0,
            keep_incumbent: true,
            seed: 0,
        }
    }
}

/// One `(algorithm, function, run)` unit.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRun {
    pub algorithm: Algorithm,
    pub function: String,
    pub run: usize,
    /// Best-so-far improvements `(evals, best_f)` up to the budget, closed
    /// by a row at the budget itself.
    pub trace: Vec<(u64, f64)>,
    pub final_best: f64,
}

/// Runs every unit. Evaluations past the budget (the last NLQN iteration
/// may overrun it) are discarded so both algorithms see the same budget.
pub fn exp2_benchmark(cfg: &Exp2Config) -> Result<Vec<BenchmarkRun>, ExperimentError> {
    if cfg.runs == 0 {
        return Err(ExperimentError::Config("runs must be at least 1".into()));
    }
    if cfg.budget == 0 {
        return Err(ExperimentError::Config("budget must be at least 1".into()));
    }
    let objectives = cfg
        .functions
        .iter()
        .map(|name| by_name(name, cfg.dim))
        .collect::<Result<Vec<_>, _>>()?;

    let mut units = Vec::new();
    for (a, &algorithm) in Algorithm::ALL.iter().enumerate() {
        for f in 0..objectives.len() {
            for run in 0..cfg.runs {
                let index = ((a * objectives.len() + f) * cfg.runs + run) as u64;
                units.push((algorithm, f, run, derive_seed(cfg.seed, index)));
            }
        }
    }

    units
        .par_iter()
        .map(|&(algorithm, f, run, seed)| {
            let objective = objectives[f].as_ref();
            let history: Vec<(u64, f64)> = match algorithm {
                Algorithm::Nlqn => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let x0 = uniform_box(&mut rng, cfg.dim, cfg.half_width);
                    let nlqn = NlqnConfig {
                        budget: Some(cfg.budget),
                        seed: derive_seed(seed, 1),
                        keep_incumbent: cfg.keep_incumbent,
                        ..NlqnConfig::benchmark(cfg.dim)
                    };
                    let res = nlqn_run(objective, &x0, &nlqn)?;
                    res.history.iter().map(|r| (r.evals, r.best_f)).collect()
                }
                Algorithm::Rbfgs => {
                    let rb = RbfgsConfig {
                        half_width: cfg.half_width,
                        seed,
                        ..RbfgsConfig::benchmark(cfg.dim, cfg.budget)
                    };
                    let res = rbfgs_run(objective, &rb)?;
                    res.history.iter().map(|r| (r.evals, r.best_f)).collect()
                }
            };
            let final_best = best_within(history.iter().copied(), cfg.budget);
            let mut trace: Vec<(u64, f64)> =
                history.into_iter().take_while(|&(e, _)| e <= cfg.budget).collect();
            if trace.last().is_none_or(|&(e, _)| e < cfg.budget) {
                trace.push((cfg.budget, final_best));
            }
            Ok(BenchmarkRun {
                algorithm,
                function: cfg.functions[f].clone(),
                run,
                trace,
                final_best,
            })
        })
        .collect()
}

/// Final best values of one `(algorithm, function)` pair, in run order.
pub fn final_values(runs: &[BenchmarkRun], algorithm: Algorithm, function: &str) -> Vec<f64> {
    runs.iter()
        .filter(|r| r.algorithm == algorithm && r.function == function)
        .map(|r| r.final_best)
        .collect()
}

/// Columns `algo,func,run,eval_count,best_f`, one row per trace point.
pub fn write_benchmark_csv(path: &Path, runs: &[BenchmarkRun]) -> std::io::Result<()> {
    let rows = runs.iter().flat_map(|r| {
        r.trace.iter().map(move |&(e, f)| {
            vec![
                r.algorithm.as_str().to_string(),
                r.function.clone(),
                r.run.to_string(),
                e.to_string(),
                fmt_float(f),
            ]
        })
    });
    write_csv(path, &["algo", "func", "run", "eval_count", "best_f"], rows)
}

/// Columns `algo,func,runs,median_best_f,min_best_f,max_best_f`.
pub fn write_benchmark_summary(path: &Path, runs: &[BenchmarkRun]) -> std::io::Result<()> {
    let mut keys: Vec<(Algorithm, String)> = runs
        .iter()
        .map(|r| (r.algorithm, r.function.clone()))
        .collect();
    keys.dedup();
    let rows = keys.into_iter().map(|(a, f)| {
        let v = final_values(runs, a, &f);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        vec![
            a.as_str().to_string(),
            f,
            v.len().to_string(),
            fmt_float(median(&v)),
            fmt_float(min),
            fmt_float(max),
        ]
    });
    write_csv(
        path,
        &["algo", "func", "runs", "median_best_f", "min_best_f", "max_best_f"],
        rows,
    )
}
