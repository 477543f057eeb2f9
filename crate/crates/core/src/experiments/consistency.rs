//! Recovery of the quadratic part's curvature from gradients of a disturbed
//! quadratic as the sampling scale grows.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stats::median;
use super::{uniform_box, ExperimentError};
use crate::eval::Evaluator;
use crate::linalg::SymmetricMatrix;
use crate::objectives::Rcigar;
use crate::optimizer::gaussian_sampler;
use crate::output::{derive_seed, fmt_float, write_csv};
use crate::quadfit::{fit, QuadraticModel, SampleBatch};

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyConfig {
    pub dim: usize,
    pub k: usize,
    pub sigmas: Vec<f64>,
    pub seeds: usize,
    pub amplitude: f64,
    pub frequency: f64,
    /// Fit centers are drawn from `[−center_half_width, center_half_width]ⁿ`.
    pub center_half_width: f64,
    pub seed: u64,
}

impl Default for ConsistencyConfig {
    /// `n = 10`, `k = 50n`, `σ ∈ {1e-2, 1, 1e3}`, 20 seeds, `a = 10`, `s = 20π`.
    fn default() -> Self {
        ConsistencyConfig {
            dim: 10,
            k: 500,
            sigmas: vec![1e-2, 1.0, 1e3],
            seeds: 20,
            amplitude: Rcigar::AMPLITUDE,
            frequency: Rcigar::FREQUENCY,
            center_half_width: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRecord {
    pub sigma: f64,
    pub seed_index: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub records: Vec<ConsistencyRecord>,
    /// `(σ, median error)` in the order of the configured grid.
    pub medians: Vec<(f64, f64)>,
}

impl ConsistencyReport {
    pub fn median_at(&self, sigma: f64) -> Option<f64> {
        self.medians.iter().find(|m| m.0 == sigma).map(|m| m.1)
    }

    /// Median error at the largest `σ` is strictly below the one at the
    /// smallest `σ`.
    pub fn ordering_holds(&self) -> bool {
        let lo = self.medians.iter().min_by(|a, b| a.0.total_cmp(&b.0));
        let hi = self.medians.iter().max_by(|a, b| a.0.total_cmp(&b.0));
        matches!((lo, hi), (Some(lo), Some(hi)) if hi.1 < lo.1)
    }
}

/// `‖H_q − H‖_F / ‖H‖_F` with `H_q = 2(A + Aᵀ)` the fitted model's Hessian.
pub fn curvature_error(model: &QuadraticModel, hessian: &SymmetricMatrix) -> f64 {
    (model.hessian().as_matrix() - hessian.as_matrix()).norm() / hessian.as_matrix().norm()
}

pub fn consistency_check(cfg: &ConsistencyConfig) -> Result<ConsistencyReport, ExperimentError> {
    if cfg.seeds == 0 || cfg.sigmas.is_empty() || cfg.k < 2 {
        return Err(ExperimentError::Config(
            "consistency check needs seeds >= 1, a sigma grid and k >= 2".into(),
        ));
    }
    let objective = Rcigar::with_params(cfg.dim, cfg.amplitude, cfg.frequency, false)?;
    let truth = objective.quadratic_hessian();
    let units: Vec<(usize, f64, usize)> = cfg
        .sigmas
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| (0..cfg.seeds).map(move |j| (i, s, j)))
        .collect();
    let records = units
        .par_iter()
        .map(|&(i, sigma, seed_index)| {
            let index = (i * cfg.seeds + seed_index) as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, index));
            let center = uniform_box(&mut rng, cfg.dim, cfg.center_half_width);
            let z = gaussian_sampler(cfg.dim, cfg.k, &mut rng);
            let mut eval = Evaluator::new(&objective, None);
            let batch = SampleBatch::assemble(&center, sigma, z, &mut eval, &mut rng)?;
            let model = fit(&batch)?;
            Ok(ConsistencyRecord {
                sigma,
                seed_index,
                error: curvature_error(&model, &truth),
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let medians = cfg
        .sigmas
        .iter()
        .map(|&s| {
            let errs: Vec<f64> = records.iter().filter(|r| r.sigma == s).map(|r| r.error).collect();
            (s, median(&errs))
        })
        .collect();
    Ok(ConsistencyReport { records, medians })
}

/// Columns `sigma,seed,error`.
pub fn write_consistency_csv(path: &Path, report: &ConsistencyReport) -> std::io::Result<()> {
    let rows = report.records.iter().map(|r| {
        vec![fmt_float(r.sigma), r.seed_index.to_string(), fmt_float(r.error)]
    });
    write_csv(path, &["sigma", "seed", "error"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undisturbed_quadratic_is_recovered_at_every_scale() {
        let report = consistency_check(&ConsistencyConfig {
            amplitude: 0.0,
            seeds: 3,
            ..Default::default()
        })
        .unwrap();
        assert!(report.records.iter().all(|r| r.error <= 1e-6), "{:?}", report.medians);
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = ConsistencyConfig {
            seeds: 2,
            ..Default::default()
        };
        assert_eq!(consistency_check(&cfg).unwrap(), consistency_check(&cfg).unwrap());
    }

    #[test]
    fn ordering_compares_extreme_scales() {
        let report = ConsistencyReport {
            records: vec![],
            medians: vec![(1e-2, 5.0), (1.0, 9.0), (1e3, 0.1)],
        };
        assert!(report.ordering_holds());
        assert_eq!(report.median_at(1.0), Some(9.0));
    }
}
