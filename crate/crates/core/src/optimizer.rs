//! The non-local quasi-Newton (NLQN) driver.
//!
//! Each iteration draws `k` fresh standard-normal directions, evaluates the
//! gradient at `x_t + σ_t zⱼ`, fits a quadratic model, and moves to the best
//! point of a geometric grid along the model's Newton direction and along
//! `−b`. The scaling `σ_t` is then adapted from the realized step.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::eval::{BestRecord, EvalCounter, Evaluator};
use crate::linalg::{Matrix, Vector};
use crate::objectives::Objective;
use crate::output::{fmt_float, write_csv};
use crate::quadfit::{direction, fit, SampleBatch};

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("objective is not finite at the initial point")]
    NonFiniteStart,
}

/// Why a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Stop {
    IterationCap,
    Budget,
    /// Sampling or fitting failed irrecoverably, e.g. a gradient stayed
    /// non-finite after one redraw. The run keeps everything evaluated so far.
    Failed { iteration: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlqnConfig {
    /// Gradient samples per iteration.
    pub k: usize,
    pub sigma0: f64,
    pub max_iterations: Option<usize>,
    /// Total function plus gradient evaluations.
    pub budget: Option<u64>,
    pub ls_base: f64,
    pub ls_min_exponent: i32,
    pub ls_max_exponent: i32,
    /// Shrink factor γ used by the scaling rule.
    pub shrink: f64,
    pub sigma_floor: f64,
    pub step_floor: f64,
    /// Steps longer than `expansion · σ_t` reset the scaling to `γ ‖step‖`.
    pub expansion: f64,
    pub trust_radius: f64,
    /// Stay at `x_t` when no linesearch candidate improves on `f(x_t)`.
    /// When false, `x_{t+1}` is always the best candidate, even a worse one.
    pub keep_incumbent: bool,
    pub seed: u64,
}

impl Default for NlqnConfig {
    fn default() -> Self {
        NlqnConfig {
            k: 3,
            sigma0: 1.0,
            max_iterations: None,
            budget: Some(100_000),
            ls_base: 6.0 / 5.0,
            ls_min_exponent: -10,
            ls_max_exponent: 10,
            shrink: 0.5,
            sigma_floor: 1e-4,
            step_floor: 1e-4,
            expansion: 2.0,
            trust_radius: 1.0,
            keep_incumbent: true,
            seed: 0,
        }
    }
}

impl NlqnConfig {
    /// Benchmark setting: `σ₀ = 10`, `k = 3n`, `γ = 1/2`.
    pub fn benchmark(n: usize) -> Self {
        NlqnConfig {
            k: 3 * n,
            sigma0: 10.0,
            shrink: 0.5,
            ..Default::default()
        }
    }

    /// Two-dimensional challenge setting: `σ₀ = 1`, `k = 3`, `γ = 10/11`,
    /// 30000 evaluations.
    pub fn siam() -> Self {
        NlqnConfig {
            k: 3,
            sigma0: 1.0,
            shrink: 10.0 / 11.0,
            budget: Some(30_000),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        let fail = |m: &str| Err(OptimizeError::Config(m.to_string()));
        if self.k < 2 {
            return fail("k must be at least 2");
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return fail("sigma0 must be positive");
        }
        if self.max_iterations.is_none() && self.budget.is_none() {
            return fail("set an iteration cap or an evaluation budget");
        }
        if !(self.ls_min_exponent <= 0 && 0 <= self.ls_max_exponent) {
            return fail("linesearch exponents must bracket zero");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return fail("shrink factor must lie in (0, 1)");
        }
        if !(self.ls_base > 0.0 && self.trust_radius > 0.0 && self.expansion > 0.0) {
            return fail("linesearch base, trust radius and expansion must be positive");
        }
        if !(self.sigma_floor > 0.0 && self.step_floor >= 0.0) {
            return fail("floors must be positive");
        }
        Ok(())
    }

    /// Number of linesearch candidates per direction.
    pub fn grid_len(&self) -> usize {
        (self.ls_max_exponent - self.ls_min_exponent + 1) as usize
    }

    /// Evaluations charged per iteration: `k` gradients and the full grid.
    pub fn evals_per_iteration(&self) -> u64 {
        (self.k + 2 * self.grid_len()) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionTag {
    Newton,
    NegB,
}

impl DirectionTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DirectionTag::Newton => "newton",
            DirectionTag::NegB => "neg_b",
        }
    }
}

/// State after iteration `t` (1-based).
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub t: usize,
    pub x: Vector,
    pub f: f64,
    pub sigma: f64,
    /// `‖Δx_t‖` of the model direction.
    pub newton_norm: f64,
    /// `‖x_{t+1} − x_t‖`.
    pub step_norm: f64,
    /// Direction of the best candidate; `None` when every candidate was
    /// non-finite.
    pub direction: Option<DirectionTag>,
    pub exponent: i32,
    /// Whether the iterate moved to the best candidate.
    pub moved: bool,
    pub used_trust_region: bool,
    pub evals: u64,
    pub best_f: f64,
}

#[derive(Debug, Clone)]
pub struct NlqnResult {
    /// The last iterate `x_C`.
    pub x: Vector,
    pub f: f64,
    /// Best point over every function evaluation of the run.
    pub best_x: Vector,
    pub best_f: f64,
    pub x0: Vector,
    pub f0: f64,
    pub sigma0: f64,
    pub trace: Vec<IterationTrace>,
    pub evals: EvalCounter,
    pub history: Vec<BestRecord>,
    pub stop: Stop,
}

/// `k` independent standard-normal columns in `Rⁿ`.
pub fn gaussian_sampler<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(n, k, |_, _| rng.sample(StandardNormal))
}

#[derive(Debug, Clone)]
pub struct LinesearchOutcome {
    pub x: Vector,
    /// `None` when every candidate was non-finite.
    pub f: Option<f64>,
    pub direction: Option<DirectionTag>,
    pub exponent: i32,
}

impl LinesearchOutcome {
    pub fn stalled(&self) -> bool {
        self.f.is_none()
    }
}

/// Evaluates `x_t + βⁱ Δx` and `x_t + βⁱ (−b)` for every grid exponent and
/// returns the argmin. Ties go to the earlier candidate in the order
/// (Newton before `−b`, smaller `i` first).
pub fn linesearch(
    eval: &mut Evaluator<'_>,
    newton: &Vector,
    neg_b: &Vector,
    x_t: &Vector,
    cfg: &NlqnConfig,
) -> LinesearchOutcome {
    let mut best = LinesearchOutcome {
        x: x_t.clone(),
        f: None,
        direction: None,
        exponent: 0,
    };
    for (tag, dir) in [(DirectionTag::Newton, newton), (DirectionTag::NegB, neg_b)] {
        for i in cfg.ls_min_exponent..=cfg.ls_max_exponent {
            let candidate = x_t + dir * cfg.ls_base.powi(i);
            let f = eval.value(&candidate);
            if f.is_finite() && best.f.is_none_or(|b| f < b) {
                best = LinesearchOutcome {
                    x: candidate,
                    f: Some(f),
                    direction: Some(tag),
                    exponent: i,
                };
            }
        }
    }
    best
}

/// Four-branch scaling update with shrink factor γ:
///
/// 1. `σ_t < floor` restarts from `σ₀` (once),
/// 2. a step shorter than the step floor gives `γ σ_t`,
/// 3. a step longer than `expansion · σ_t` gives `γ ‖step‖`,
/// 4. otherwise `σ_t` is kept.
pub fn scaling(sigma0: f64, sigma_t: f64, step: &Vector, cfg: &NlqnConfig) -> f64 {
    scaling_norm(sigma0, sigma_t, step.norm(), cfg, true)
}

fn scaling_norm(sigma0: f64, sigma_t: f64, step: f64, cfg: &NlqnConfig, may_reset: bool) -> f64 {
    if sigma_t < cfg.sigma_floor && may_reset {
        return scaling_norm(sigma0, sigma0, step, cfg, false);
    }
    if step < cfg.step_floor {
        cfg.shrink * sigma_t
    } else if step > cfg.expansion * sigma_t {
        cfg.shrink * step
    } else {
        sigma_t
    }
}

pub fn nlqn_run(f: &dyn Objective, x0: &Vector, cfg: &NlqnConfig) -> Result<NlqnResult, OptimizeError> {
    cfg.validate()?;
    let n = f.dim();
    if x0.len() != n {
        return Err(OptimizeError::Config(format!(
            "x0 has {} entries, objective has dimension {n}",
            x0.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator::new(f, cfg.budget);
    let f0 = eval.value(x0);
    if !f0.is_finite() || !x0.iter().all(|v| v.is_finite()) {
        return Err(OptimizeError::NonFiniteStart);
    }

    let mut x = x0.clone();
    let mut fx = f0;
    let mut sigma = cfg.sigma0;
    let mut trace = Vec::new();
    let mut t = 0;
    let stop = loop {
        if cfg.max_iterations.is_some_and(|c| t >= c) {
            break Stop::IterationCap;
        }
        if eval.exhausted() {
            break Stop::Budget;
        }
        let z = gaussian_sampler(n, cfg.k, &mut rng);
        let dirs = match SampleBatch::assemble(&x, sigma, z, &mut eval, &mut rng)
            .and_then(|batch| fit(&batch))
            .and_then(|model| direction(&model, cfg.trust_radius))
        {
            Ok(d) => d,
            Err(e) => {
                break Stop::Failed {
                    iteration: t + 1,
                    reason: e.to_string(),
                }
            }
        };
        let ls = linesearch(&mut eval, &dirs.newton, &dirs.neg_b, &x, cfg);
        let moved = ls.f.is_some_and(|v| !cfg.keep_incumbent || v < fx);
        let step = if moved { &ls.x - &x } else { Vector::zeros(n) };
        sigma = scaling(cfg.sigma0, sigma, &step, cfg);
        if moved {
            fx = ls.f.unwrap_or(fx);
            x = ls.x;
        }
        t += 1;
        trace.push(IterationTrace {
            t,
            x: x.clone(),
            f: fx,
            sigma,
            newton_norm: dirs.newton.norm(),
            step_norm: step.norm(),
            direction: ls.direction,
            exponent: ls.exponent,
            moved,
            used_trust_region: dirs.used_trust_region,
            evals: eval.total(),
            best_f: eval.best().map_or(fx, |b| b.0),
        });
    };

    let (evals, best, history) = eval.into_parts();
    let (best_f, best_x) = best.unwrap_or((f0, x0.clone()));
    Ok(NlqnResult {
        x,
        f: fx,
        best_x,
        best_f,
        x0: x0.clone(),
        f0,
        sigma0: cfg.sigma0,
        trace,
        evals,
        history,
        stop,
    })
}

/// Writes `t,f_xt,sigma_t,step_norm,dir_tag,exponent_i,evals,best_f`.
/// `dir_tag` is `newton` or `neg_b` for an accepted step, `keep` when the
/// iterate stayed put and `stall` when every candidate was non-finite.
/// Row `t = 0` is the initial point (tag `init`).
pub fn write_trace_csv(path: &Path, result: &NlqnResult) -> std::io::Result<()> {
    let init = vec![
        "0".to_string(),
        fmt_float(result.f0),
        fmt_float(result.sigma0),
        fmt_float(0.0),
        "init".to_string(),
        "0".to_string(),
        "1".to_string(),
        fmt_float(result.f0),
    ];
    let rows = std::iter::once(init).chain(result.trace.iter().map(|it| {
        vec![
            it.t.to_string(),
            fmt_float(it.f),
            fmt_float(it.sigma),
            fmt_float(it.newton_norm),
            match (it.direction, it.moved) {
                (None, _) => "stall",
                (Some(_), false) => "keep",
                (Some(d), true) => d.as_str(),
            }
            .to_string(),
            it.exponent.to_string(),
            it.evals.to_string(),
            fmt_float(it.best_f),
        ]
    }));
    write_csv(
        path,
        &["t", "f_xt", "sigma_t", "step_norm", "dir_tag", "exponent_i", "evals", "best_f"],
        rows,
    )
}
