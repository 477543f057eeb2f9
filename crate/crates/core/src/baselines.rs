//! Randomly reinitialized BFGS (rBFGS).
//!
//! A dense BFGS with inverse-Hessian updates and a strong-Wolfe linesearch
//! is restarted from a fresh uniform draw on `[x₀ − σ₀, x₀ + σ₀]ⁿ` whenever
//! it converges, fails, or meets a non-finite value, until the evaluation
//! budget is spent. Every function and gradient probe is charged.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eval::{BestRecord, EvalCounter, Evaluator};
use crate::linalg::{Matrix, Vector};
use crate::objectives::Objective;
use crate::output::{fmt_float, write_csv};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbfgsConfig {
    pub grad_tol: f64,
    pub center: Vector,
    pub half_width: f64,
    pub budget: u64,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    pub seed: u64,
}

impl RbfgsConfig {
    /// Restart box `[−10, 10]ⁿ`, tolerance `1e-4`, Wolfe constants `(1e-4, 0.9)`.
    pub fn benchmark(n: usize, budget: u64) -> Self {
        RbfgsConfig {
            grad_tol: 1e-4,
            center: Vector::zeros(n),
            half_width: 10.0,
            budget,
            c1: 1e-4,
            c2: 0.9,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), BaselineError> {
        if !(self.grad_tol > 0.0 && self.half_width > 0.0) {
            return Err(BaselineError::Config("tolerances must be positive".into()));
        }
        if !(0.0 < self.c1 && self.c1 < self.c2 && self.c2 < 1.0) {
            return Err(BaselineError::Config("need 0 < c1 < c2 < 1".into()));
        }
        if self.budget == 0 {
            return Err(BaselineError::Config("budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalStatus {
    Converged,
    LinesearchFailed,
    NonFinite,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub x: Vector,
    pub f: f64,
    pub status: LocalStatus,
    pub iterations: usize,
}

impl LocalResult {
    pub fn converged(&self) -> bool {
        self.status == LocalStatus::Converged
    }
}

const MAX_ZOOM: usize = 50;
const MAX_BRACKET: usize = 50;

struct Probe {
    alpha: f64,
    f: f64,
    /// Directional derivative, evaluated lazily.
    d: Option<f64>,
    g: Option<Vector>,
}

enum Search {
    Found { x: Vector, f: f64, g: Vector },
    Failed,
    NonFinite,
    Budget,
}

/// Strong-Wolfe linesearch along `p` from `x` (bracketing followed by zoom
/// with safeguarded cubic interpolation).
fn wolfe_search(
    eval: &mut Evaluator<'_>,
    x: &Vector,
    f0: f64,
    d0: f64,
    p: &Vector,
    c1: f64,
    c2: f64,
) -> Search {
    // Gradient is only requested once sufficient decrease holds.
    let mut probe = |eval: &mut Evaluator<'_>, alpha: f64, need_grad: bool| -> Option<Probe> {
        if eval.exhausted() {
            return None;
        }
        let xa = x + p * alpha;
        let f = eval.value(&xa);
        let mut out = Probe {
            alpha,
            f,
            d: None,
            g: None,
        };
        if need_grad && f.is_finite() && f <= f0 + c1 * alpha * d0 {
            if eval.exhausted() {
                return None;
            }
            let g = eval.gradient(&xa);
            out.d = Some(g.dot(p));
            out.g = Some(g);
        }
        Some(out)
    };

    let found = |pr: Probe| Search::Found {
        x: x + p * pr.alpha,
        f: pr.f,
        g: pr.g.expect("gradient evaluated"),
    };

    let mut prev = Probe {
        alpha: 0.0,
        f: f0,
        d: Some(d0),
        g: None,
    };
    let mut alpha = 1.0;
    for i in 0..MAX_BRACKET {
        let Some(cur) = probe(eval, alpha, true) else {
            return Search::Budget;
        };
        if !cur.f.is_finite() {
            // Back off toward the last finite point.
            if i + 1 == MAX_BRACKET {
                return Search::NonFinite;
            }
            alpha = 0.5 * (prev.alpha + alpha);
            if alpha <= prev.alpha * (1.0 + 1e-12) + f64::MIN_POSITIVE {
                return Search::NonFinite;
            }
            continue;
        }
        if cur.f > f0 + c1 * cur.alpha * d0 || (i > 0 && cur.f >= prev.f) {
            return zoom(eval, &mut probe, prev, cur, f0, d0, c1, c2, found);
        }
        let d = cur.d.expect("sufficient decrease holds");
        if d.abs() <= -c2 * d0 {
            return found(cur);
        }
        if d >= 0.0 {
            return zoom(eval, &mut probe, cur, prev, f0, d0, c1, c2, found);
        }
        alpha *= 2.0;
        prev = cur;
    }
    Search::Failed
}

#[allow(clippy::too_many_arguments)]
fn zoom<P, F>(
    eval: &mut Evaluator<'_>,
    probe: &mut P,
    mut lo: Probe,
    mut hi: Probe,
    f0: f64,
    d0: f64,
    c1: f64,
    c2: f64,
    found: F,
) -> Search
where
    P: FnMut(&mut Evaluator<'_>, f64, bool) -> Option<Probe>,
    F: Fn(Probe) -> Search,
{
    for _ in 0..MAX_ZOOM {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= 1e-16 * b.max(1.0) {
            break;
        }
        let mut alpha = interpolate(&lo, &hi).unwrap_or(0.5 * (a + b));
        let margin = 0.1 * width;
        if !(alpha > a + margin && alpha < b - margin) {
            alpha = 0.5 * (a + b);
        }
        let Some(cur) = probe(eval, alpha, true) else {
            return Search::Budget;
        };
        if !cur.f.is_finite() || cur.f > f0 + c1 * alpha * d0 || cur.f >= lo.f {
            hi = cur;
            continue;
        }
        let d = cur.d.expect("sufficient decrease holds");
        if d.abs() <= -c2 * d0 {
            return found(cur);
        }
        if d * (hi.alpha - lo.alpha) >= 0.0 {
            hi = lo;
        }
        lo = cur;
    }
    Search::Failed
}

/// Minimizer of the cubic through two probes with known values and, where
/// available, slopes; falls back to the quadratic through `lo`'s slope.
fn interpolate(lo: &Probe, hi: &Probe) -> Option<f64> {
    let (a0, f_a, d_a) = (lo.alpha, lo.f, lo.d?);
    let (a1, f_b) = (hi.alpha, hi.f);
    if !f_b.is_finite() {
        return None;
    }
    match hi.d {
        Some(d_b) => {
            let d1 = d_a + d_b - 3.0 * (f_a - f_b) / (a0 - a1);
            let disc = d1 * d1 - d_a * d_b;
            if disc < 0.0 {
                return None;
            }
            let d2 = (a1 - a0).signum() * disc.sqrt();
            let t = a1 - (a1 - a0) * (d_b + d2 - d1) / (d_b - d_a + 2.0 * d2);
            t.is_finite().then_some(t)
        }
        None => {
            let h = a1 - a0;
            let curv = f_b - f_a - d_a * h;
            if curv <= 0.0 {
                return None;
            }
            let t = a0 - d_a * h * h / (2.0 * curv);
            t.is_finite().then_some(t)
        }
    }
}

/// Dense BFGS from `start` until `‖∇f‖ < grad_tol`, the linesearch fails,
/// or the evaluator's budget is exhausted.
pub fn bfgs_local(
    eval: &mut Evaluator<'_>,
    start: &Vector,
    grad_tol: f64,
    c1: f64,
    c2: f64,
) -> LocalResult {
    let n = start.len();
    let mut x = start.clone();
    let stop = |x: Vector, f: f64, status, iterations| LocalResult {
        x,
        f,
        status,
        iterations,
    };
    if eval.exhausted() {
        return stop(x, f64::NAN, LocalStatus::BudgetExhausted, 0);
    }
    let mut g = eval.gradient(&x);
    if !g.iter().all(|v| v.is_finite()) {
        return stop(x, f64::NAN, LocalStatus::NonFinite, 0);
    }
    if eval.exhausted() {
        return stop(x, f64::NAN, LocalStatus::BudgetExhausted, 0);
    }
    let mut f = eval.value(&x);
    if !f.is_finite() {
        return stop(x, f, LocalStatus::NonFinite, 0);
    }
    let mut h_inv = Matrix::identity(n, n);
    let mut iterations = 0;
    loop {
        if g.norm() < grad_tol {
            return stop(x, f, LocalStatus::Converged, iterations);
        }
        if eval.exhausted() {
            return stop(x, f, LocalStatus::BudgetExhausted, iterations);
        }
        let mut p = -(&h_inv * &g);
        let mut d0 = g.dot(&p);
        if !(d0 < 0.0) {
            h_inv = Matrix::identity(n, n);
            p = -&g;
            d0 = -g.norm_squared();
        }
        let (x_new, f_new, g_new) = match wolfe_search(eval, &x, f, d0, &p, c1, c2) {
            Search::Found { x, f, g } => (x, f, g),
            Search::Failed => return stop(x, f, LocalStatus::LinesearchFailed, iterations),
            Search::NonFinite => return stop(x, f, LocalStatus::NonFinite, iterations),
            Search::Budget => return stop(x, f, LocalStatus::BudgetExhausted, iterations),
        };
        if !g_new.iter().all(|v| v.is_finite()) {
            return stop(x, f, LocalStatus::NonFinite, iterations);
        }
        let s = &x_new - &x;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            bfgs_update(&mut h_inv, &s, &y, sy);
        }
        x = x_new;
        f = f_new;
        g = g_new;
        iterations += 1;
    }
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with `ρ = 1 / sᵀy`.
fn bfgs_update(h: &mut Matrix, s: &Vector, y: &Vector, sy: f64) {
    let rho = 1.0 / sy;
    let hy = &*h * y;
    let yhy = y.dot(&hy);
    // Expanded form: H − ρ(H y sᵀ + s yᵀ H) + (ρ² yᵀHy + ρ) s sᵀ.
    let coeff = rho * rho * yhy + rho;
    let n = s.len();
    for j in 0..n {
        for i in 0..n {
            h[(i, j)] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + coeff * s[i] * s[j];
        }
    }
    // Keep H exactly symmetric.
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
}

/// Uniform draw on `[center − half_width, center + half_width]ⁿ`.
pub fn draw_restart<R: Rng + ?Sized>(rng: &mut R, center: &Vector, half_width: f64) -> Vector {
    Vector::from_fn(center.len(), |i, _| {
        center[i] + rng.random_range(-half_width..half_width)
    })
}

#[derive(Debug, Clone)]
pub struct RbfgsResult {
    pub best_x: Vector,
    pub best_f: f64,
    pub restarts: usize,
    pub evals: EvalCounter,
    /// Best-so-far improvements, tagged with the restart index.
    pub history: Vec<BestRecord>,
}

pub fn rbfgs_run(f: &dyn Objective, cfg: &RbfgsConfig) -> Result<RbfgsResult, BaselineError> {
    cfg.validate()?;
    if cfg.center.len() != f.dim() {
        return Err(BaselineError::Config("center dimension differs from objective".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator::new(f, Some(cfg.budget));
    let mut restarts = 0;
    while !eval.exhausted() {
        eval.set_tag(restarts);
        let start = draw_restart(&mut rng, &cfg.center, cfg.half_width);
        bfgs_local(&mut eval, &start, cfg.grad_tol, cfg.c1, cfg.c2);
        restarts += 1;
    }
    let (evals, best, history) = eval.into_parts();
    let (best_f, best_x) = best.unwrap_or((f64::INFINITY, cfg.center.clone()));
    Ok(RbfgsResult {
        best_x,
        best_f,
        restarts,
        evals,
        history,
    })
}

/// Writes `eval_count,best_f,restart_index` with one row per improvement and
/// a closing row at the final evaluation count.
pub fn write_trace_csv(path: &Path, result: &RbfgsResult) -> std::io::Result<()> {
    let mut rows: Vec<Vec<String>> = result
        .history
        .iter()
        .map(|r| vec![r.evals.to_string(), fmt_float(r.best_f), r.tag.to_string()])
        .collect();
    if result.history.last().is_none_or(|r| r.evals < result.evals.total()) {
        rows.push(vec![
            result.evals.total().to_string(),
            fmt_float(result.best_f),
            result.restarts.saturating_sub(1).to_string(),
        ]);
    }
    write_csv(path, &["eval_count", "best_f", "restart_index"], rows)
}
