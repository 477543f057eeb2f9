//! Integrated squared gradient mismatch between a Rastrigin-type function
//! and its quadratic part under a Gaussian sampling measure.

use std::path::Path;

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::linalg::Vector;
use crate::objectives::RastriginModel;
use crate::output::{derive_seed, fmt_float, write_csv};

const MC_CHUNK: usize = 1 << 16;

/// Closed form of `E‖∇g(x)‖²` for `x ~ N(0, σ²Σ)`:
///
/// `½ Σⱼ Σ_ℓ aⱼ a_ℓ sⱼᵀs_ℓ (cos(ψⱼ−ψ_ℓ) e^{−σ²‖sⱼ−s_ℓ‖²_Σ/2} − cos(ψⱼ+ψ_ℓ) e^{−σ²‖sⱼ+s_ℓ‖²_Σ/2})`.
pub fn residual_exact(model: &RastriginModel, sigma: f64) -> f64 {
    let s = model.frequencies();
    let a = model.amplitudes();
    let psi = model.phases();
    let kernel = model.kernel();
    let m = model.terms();
    let var = sigma * sigma;
    let mut total = 0.0;
    for j in 0..m {
        for l in 0..m {
            let sj = s.column(j);
            let sl = s.column(l);
            let minus: Vector = sj - sl;
            let plus: Vector = sj + sl;
            let e_minus = (-0.5 * var * kernel.quad_form(&minus)).exp();
            let e_plus = (-0.5 * var * kernel.quad_form(&plus)).exp();
            total += a[j] * a[l] * sj.dot(&sl)
                * ((psi[j] - psi[l]).cos() * e_minus - (psi[j] + psi[l]).cos() * e_plus);
        }
    }
    0.5 * total
}

/// `2‖a‖²‖S‖_F² (1 + (m−1) exp(−σ²ε²/2))` with the model's separation `ε`.
pub fn residual_bound(model: &RastriginModel, sigma: f64) -> f64 {
    let m = model.terms() as f64;
    let eps = model.separation();
    let decay = if eps.is_infinite() {
        0.0
    } else {
        (-(sigma * sigma) * eps * eps / 2.0).exp()
    };
    2.0 * model.amplitudes().norm_squared()
        * model.frequencies().norm_squared()
        * (1.0 + (m - 1.0) * decay)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Sample mean of `‖∇g(x)‖²` over `samples` draws `x = σ L ξ`, `LLᵀ = Σ`.
/// Draws are split into fixed chunks with their own seeds, so the estimate
/// does not depend on the thread count.
pub fn residual_monte_carlo(
    model: &RastriginModel,
    sigma: f64,
    samples: usize,
    seed: u64,
) -> MonteCarloEstimate {
    let n = model.dim();
    let m = model.terms();
    let scaled_l = Cholesky::new(model.kernel().as_matrix().clone())
        .expect("model kernel is positive definite")
        .l()
        * sigma;
    // Column-major slices; the inner loop runs once per draw, so it avoids
    // allocating.
    let l = scaled_l.as_slice();
    let s = model.frequencies().as_slice();
    let a = model.amplitudes().as_slice();
    let psi = model.phases().as_slice();
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, c as u64));
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut xi = vec![0.0; n];
            let mut x = vec![0.0; n];
            let mut w = vec![0.0; m];
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                for v in xi.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                for (i, xv) in x.iter_mut().enumerate() {
                    *xv = (0..=i).map(|k| l[k * n + i] * xi[k]).sum();
                }
                for j in 0..m {
                    let proj: f64 = (0..n).map(|i| s[j * n + i] * x[i]).sum();
                    w[j] = -a[j] * (proj + psi[j]).sin();
                }
                let v: f64 = (0..n)
                    .map(|i| {
                        let g: f64 = (0..m).map(|j| s[j * n + i] * w[j]).sum();
                        g * g
                    })
                    .sum();
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let k = samples as f64;
    let mean = sum / k;
    let var = if samples > 1 {
        ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        f64::NAN
    };
    MonteCarloEstimate {
        mean,
        std_error: (var / k).sqrt(),
        samples,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckRecord {
    pub sigma: f64,
    pub mc_estimate: f64,
    pub mc_std_error: f64,
    pub exact: f64,
    pub bound: f64,
}

impl BoundCheckRecord {
    pub fn within_bound(&self) -> bool {
        self.exact <= self.bound
    }

    /// `|mc − exact| ≤ 5` standard errors.
    pub fn mc_agrees(&self) -> bool {
        (self.mc_estimate - self.exact).abs() <= 5.0 * self.mc_std_error
    }
}

/// Exact residual, bound and Monte-Carlo estimate at every `σ` in `sigmas`.
pub fn bound_check(
    model: &RastriginModel,
    sigmas: &[f64],
    mc_samples: usize,
    seed: u64,
) -> Vec<BoundCheckRecord> {
    sigmas
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let mc = residual_monte_carlo(model, sigma, mc_samples, derive_seed(seed, i as u64));
            BoundCheckRecord {
                sigma,
                mc_estimate: mc.mean,
                mc_std_error: mc.std_error,
                exact: residual_exact(model, sigma),
                bound: residual_bound(model, sigma),
            }
        })
        .collect()
}

/// Columns `sigma,mc,exact,bound`.
pub fn write_bound_csv(path: &Path, records: &[BoundCheckRecord]) -> std::io::Result<()> {
    let rows = records.iter().map(|r| {
        vec![
            fmt_float(r.sigma),
            fmt_float(r.mc_estimate),
            fmt_float(r.exact),
            fmt_float(r.bound),
        ]
    });
    write_csv(path, &["sigma", "mc", "exact", "bound"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, SymmetricMatrix};

    fn single_cosine() -> RastriginModel {
        RastriginModel::new(
            SymmetricMatrix::zeros(2),
            Vector::from_vec(vec![1.0]),
            Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
            Vector::from_vec(vec![0.0]),
            SymmetricMatrix::identity(2),
        )
        .unwrap()
    }

    #[test]
    fn single_cosine_matches_gaussian_integral() {
        // E[sin²(x₁)] for x₁ ~ N(0, σ²) is (1 − e^{−2σ²}) / 2.
        let model = single_cosine();
        for sigma in [0.1f64, 0.5, 1.0, 3.0] {
            let expected = 0.5 * (1.0 - (-2.0 * sigma * sigma).exp());
            assert!((residual_exact(&model, sigma) - expected).abs() < 1e-15);
            assert_eq!(residual_bound(&model, sigma), 2.0);
        }
    }

    #[test]
    fn zero_amplitude_has_zero_residual() {
        let base = RastriginModel::random(3, 4, 11).unwrap();
        let model = RastriginModel::new(
            base.r_hessian_half().clone(),
            Vector::zeros(4),
            base.frequencies().clone(),
            base.phases().clone(),
            base.kernel().clone(),
        )
        .unwrap();
        assert_eq!(residual_exact(&model, 1.0), 0.0);
        assert_eq!(residual_monte_carlo(&model, 1.0, 1000, 0).mean, 0.0);
    }

    #[test]
    fn random_model_is_within_bound() {
        let model = RastriginModel::random(3, 5, 2).unwrap();
        for sigma in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            assert!(residual_exact(&model, sigma) <= residual_bound(&model, sigma));
        }
    }

    #[test]
    fn large_sigma_plateau() {
        // Cross terms vanish, leaving Σⱼ aⱼ²‖sⱼ‖²/2 unless some sⱼ ± s_ℓ = 0.
        let model = RastriginModel::random(3, 5, 8).unwrap();
        let plateau: f64 = (0..5)
            .map(|j| model.amplitudes()[j].powi(2) * model.frequencies().column(j).norm_squared())
            .sum::<f64>()
            / 2.0;
        assert!((residual_exact(&model, 1e3) - plateau).abs() < 1e-9 * plateau.max(1.0));
        assert!(plateau <= residual_bound(&model, 1e3));
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        let model = RastriginModel::random(2, 3, 5).unwrap();
        for r in bound_check(&model, &[0.3, 1.0], 200_000, 9) {
            assert!(r.mc_agrees(), "{r:?}");
            assert!(r.within_bound());
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let model = RastriginModel::random(2, 3, 5).unwrap();
        let a = residual_monte_carlo(&model, 1.0, 100_000, 4);
        assert_eq!(a, residual_monte_carlo(&model, 1.0, 100_000, 4));
    }
}
