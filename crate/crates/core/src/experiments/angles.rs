//! Angles between estimated descent directions and the direction to the
//! global minimizer on a disturbed ill-conditioned quadratic.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{uniform_box, ExperimentError};
use crate::eval::Evaluator;
use crate::linalg::Vector;
use crate::objectives::Rcigar;
use crate::optimizer::gaussian_sampler;
use crate::output::{derive_seed, fmt_float, write_csv};
use crate::quadfit::{direction, fit, SampleBatch};

/// Values taken by both `σ₀` and the initialization half-width `U`.
pub const EXP1_SCALES: [f64; 6] = [1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    /// Minimizer `Δx₀` of the fitted model.
    Newton,
    /// Negated linear term `−b₀` of the fitted model.
    NegB,
    /// Negated mean sampled gradient `−ḡ`.
    MeanGrad,
    /// Uniformly random unit direction.
    Random,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [
        Estimator::Newton,
        Estimator::NegB,
        Estimator::MeanGrad,
        Estimator::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Newton => "newton",
            Estimator::NegB => "neg_b",
            Estimator::MeanGrad => "mean_grad",
            Estimator::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleRecord {
    pub sigma0: f64,
    pub half_width: f64,
    pub trial: usize,
    pub estimator: Estimator,
    /// Radians in `[0, π]`.
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exp1Config {
    pub dim: usize,
    pub k: usize,
    pub trials: usize,
    pub sigmas: Vec<f64>,
    pub half_widths: Vec<f64>,
    pub trust_radius: f64,
    pub seed: u64,
}

impl Default for Exp1Config {
    /// `n = 20`, `k = 30`, 100 trials over the full 6 × 6 grid.
    fn default() -> Self {
        Exp1Config {
            dim: 20,
            k: 30,
            trials: 100,
            sigmas: EXP1_SCALES.to_vec(),
            half_widths: EXP1_SCALES.to_vec(),
            trust_radius: 1.0,
            seed: 0,
        }
    }
}

/// `arccos(⟨d, t⟩ / (‖d‖‖t‖))`, clamped into `[0, π]`. A zero direction
/// carries no information and is assigned `π/2`.
pub fn angle_between(d: &Vector, target: &Vector) -> f64 {
    let denom = d.norm() * target.norm();
    if denom == 0.0 || !denom.is_finite() {
        return FRAC_PI_2;
    }
    (d.dot(target) / denom).clamp(-1.0, 1.0).acos()
}

/// Runs every `(σ₀, U, trial)` unit and returns the records sorted by cell,
/// trial and estimator.
pub fn exp1_angles(cfg: &Exp1Config) -> Result<Vec<AngleRecord>, ExperimentError> {
    if cfg.trials == 0 || cfg.k < 2 || cfg.dim < 2 {
        return Err(ExperimentError::Config(
            "exp1 needs trials >= 1, k >= 2 and n >= 2".into(),
        ));
    }
    let objective = Rcigar::new(cfg.dim, false)?;
    let cells: Vec<(f64, f64)> = cfg
        .sigmas
        .iter()
        .flat_map(|&s| cfg.half_widths.iter().map(move |&u| (s, u)))
        .collect();
    let units: Vec<(usize, f64, f64, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, &(s, u))| (0..cfg.trials).map(move |t| (c, s, u, t)))
        .collect();

    let per_unit: Result<Vec<Vec<AngleRecord>>, ExperimentError> = units
        .par_iter()
        .map(|&(cell, sigma0, half_width, trial)| {
            let index = (cell * cfg.trials + trial) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, index));
            let x0 = loop {
                let x = uniform_box(&mut rng, cfg.dim, half_width);
                if x.norm() > 0.0 {
                    break x;
                }
            };
            let z = gaussian_sampler(cfg.dim, cfg.k, &mut rng);
            let mut eval = Evaluator::new(&objective, None);
            let batch = SampleBatch::assemble(&x0, sigma0, z, &mut eval, &mut rng)?;
            let model = fit(&batch)?;
            let dirs = direction(&model, cfg.trust_radius)?;
            let random = Vector::from_fn(cfg.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
            let target = -&x0;
            let directions = [
                (Estimator::Newton, dirs.newton),
                (Estimator::NegB, dirs.neg_b),
                (Estimator::MeanGrad, -batch.mean_gradient()),
                (Estimator::Random, random),
            ];
            Ok(directions
                .into_iter()
                .map(|(estimator, d)| AngleRecord {
                    sigma0,
                    half_width,
                    trial,
                    estimator,
                    angle: angle_between(&d, &target),
                })
                .collect())
        })
        .collect();
    Ok(per_unit?.into_iter().flatten().collect())
}

/// Angles of one estimator in one `(σ₀, U)` cell, in trial order.
pub fn cell_angles(records: &[AngleRecord], sigma0: f64, half_width: f64, e: Estimator) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.sigma0 == sigma0 && r.half_width == half_width && r.estimator == e)
        .map(|r| r.angle)
        .collect()
}

/// Columns `sigma0,U,trial,estimator,angle_rad`.
pub fn write_angles_csv(path: &Path, records: &[AngleRecord]) -> std::io::Result<()> {
    let rows = records.iter().map(|r| {
        vec![
            fmt_float(r.sigma0),
            fmt_float(r.half_width),
            r.trial.to_string(),
            r.estimator.as_str().to_string(),
            fmt_float(r.angle),
        ]
    });
    write_csv(path, &["sigma0", "U", "trial", "estimator", "angle_rad"], rows)
}
