//! Non-local quadratic model fitting from sampled gradients.
//!
//! Around a center `x_t` with scaling `σ`, gradients are sampled at
//! `x_t + σ zⱼ`. The model `q(x) = ⟨x, (A+Aᵀ) x⟩ + bᵀx` is fitted so that
//! `∇q(σ zⱼ) = (A+Aᵀ) Zⱼ + b` with `Z = 2σ z` matches those gradients in
//! the least-squares sense. The normal equations reduce to a Lyapunov-type
//! equation in the symmetric curvature `H = A + Aᵀ`:
//!
//! ```text
//! H (Z − Z̄) Zᵀ + Z (Z − Z̄)ᵀ H = (G − Ḡ) Zᵀ + Z (G − Ḡ)ᵀ,    b = ḡ − H z̄
//! ```

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::eval::Evaluator;
use crate::linalg::{
    lyapunov_lsq_solve, spd_solve, sym_eig, trust_region_min, LinalgError, Matrix, SymmetricMatrix,
    Vector,
};

#[derive(Debug, Error)]
pub enum QuadfitError {
    #[error("invalid batch: {0}")]
    InvalidBatch(String),
    #[error("non-finite gradient at {point:?} after resampling")]
    NonFiniteGradient { point: Vec<f64> },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Sampled gradients around one center.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    center: Vector,
    sigma: f64,
    /// Unscaled samples `zⱼ` as columns, `n × k`.
    samples: Matrix,
    /// `G[:, j] = ∇f(center + σ zⱼ)`.
    gradients: Matrix,
}

impl SampleBatch {
    /// Builds a batch from precomputed gradients.
    pub fn new(
        center: Vector,
        sigma: f64,
        samples: Matrix,
        gradients: Matrix,
    ) -> Result<Self, QuadfitError> {
        let n = center.len();
        let k = samples.ncols();
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(QuadfitError::InvalidBatch(format!("sigma must be positive, got {sigma}")));
        }
        if k < 2 {
            return Err(QuadfitError::InvalidBatch(format!("need k >= 2 samples, got {k}")));
        }
        if samples.nrows() != n || gradients.nrows() != n || gradients.ncols() != k {
            return Err(QuadfitError::InvalidBatch("shape mismatch".into()));
        }
        let finite = |m: &Matrix| m.iter().all(|v| v.is_finite());
        if !finite(&samples) || !finite(&gradients) || !center.iter().all(|v| v.is_finite()) {
            return Err(QuadfitError::InvalidBatch("non-finite entries".into()));
        }
        Ok(SampleBatch {
            center,
            sigma,
            samples,
            gradients,
        })
    }

    /// Evaluates `∇f(center + σ zⱼ)` for every column, charging the
    /// evaluator. A column whose gradient is non-finite is redrawn once from
    /// a standard normal; a second failure is a hard error.
    pub fn assemble<R: Rng + ?Sized>(
        center: &Vector,
        sigma: f64,
        mut samples: Matrix,
        eval: &mut Evaluator<'_>,
        rng: &mut R,
    ) -> Result<Self, QuadfitError> {
        let n = center.len();
        let k = samples.ncols();
        if !(sigma > 0.0) || k < 2 || samples.nrows() != n {
            return Err(QuadfitError::InvalidBatch(format!(
                "sigma={sigma}, samples {}x{k}, n={n}",
                samples.nrows()
            )));
        }
        let mut gradients = Matrix::zeros(n, k);
        for j in 0..k {
            let mut attempt = 0;
            loop {
                let point = center + samples.column(j) * sigma;
                let g = eval.gradient(&point);
                if g.iter().all(|v| v.is_finite()) {
                    gradients.set_column(j, &g);
                    break;
                }
                attempt += 1;
                if attempt == 2 {
                    return Err(QuadfitError::NonFiniteGradient {
                        point: point.as_slice().to_vec(),
                    });
                }
                for i in 0..n {
                    samples[(i, j)] = rng.sample(StandardNormal);
                }
            }
        }
        SampleBatch::new(center.clone(), sigma, samples, gradients)
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn samples(&self) -> &Matrix {
        &self.samples
    }

    pub fn gradients(&self) -> &Matrix {
        &self.gradients
    }

    pub fn len(&self) -> usize {
        self.samples.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.ncols() == 0
    }

    /// Sampled points `center + σ zⱼ` as columns.
    pub fn points(&self) -> Matrix {
        let mut pts = &self.samples * self.sigma;
        for mut col in pts.column_iter_mut() {
            col += &self.center;
        }
        pts
    }

    /// Scaled sample matrix `Z = 2σ z`.
    pub fn scaled(&self) -> Matrix {
        &self.samples * (2.0 * self.sigma)
    }

    /// Empirical mean gradient `ḡ`.
    pub fn mean_gradient(&self) -> Vector {
        self.gradients.column_mean()
    }
}

/// Fitted `q(x) = ⟨x, (A+Aᵀ) x⟩ + bᵀx` in coordinates relative to the center.
#[derive(Debug, Clone)]
pub struct QuadraticModel {
    a: SymmetricMatrix,
    b: Vector,
    /// Frobenius residual of the Lyapunov-type system.
    pub fit_residual: f64,
    /// `A + Aᵀ` passes the positive-definiteness test.
    pub definite: bool,
    /// The centered sample matrix has numerical rank below `n`.
    pub degenerate: bool,
}

impl QuadraticModel {
    pub fn new(a: SymmetricMatrix, b: Vector) -> Result<Self, QuadfitError> {
        let definite = sym_eig(&a.doubled())?.is_positive_definite();
        Ok(QuadraticModel {
            a,
            b,
            fit_residual: 0.0,
            definite,
            degenerate: false,
        })
    }

    /// `A` (symmetric).
    pub fn a(&self) -> &SymmetricMatrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    /// `A + Aᵀ`.
    pub fn curvature(&self) -> SymmetricMatrix {
        self.a.doubled()
    }

    /// Hessian of `q`, `2(A + Aᵀ)`.
    pub fn hessian(&self) -> SymmetricMatrix {
        self.a.scale(4.0)
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.curvature().quad_form(x) + self.b.dot(x)
    }

    /// `∇q(x) = 2(A + Aᵀ) x + b`.
    pub fn gradient(&self, x: &Vector) -> Vector {
        self.a.as_matrix() * x * 4.0 + &self.b
    }
}

/// Least-squares quadratic model of a gradient batch.
pub fn fit(batch: &SampleBatch) -> Result<QuadraticModel, QuadfitError> {
    let n = batch.center.len();
    let z = batch.scaled();
    let z_mean = z.column_mean();
    let g_mean = batch.mean_gradient();
    let mut z_c = z.clone();
    let mut g_c = batch.gradients.clone();
    for j in 0..batch.len() {
        let mut zc = z_c.column_mut(j);
        zc -= &z_mean;
        let mut gc = g_c.column_mut(j);
        gc -= &g_mean;
    }
    // (Z − Z̄) Zᵀ equals (Z − Z̄)(Z − Z̄)ᵀ exactly in exact arithmetic, so the
    // symmetrized product is used and the spectral Lyapunov path applies.
    let p = SymmetricMatrix::from_matrix(&(&z_c * z.transpose()));
    let v = &g_c * z.transpose();
    let rhs = SymmetricMatrix::from_matrix(&(&v + v.transpose()));
    let sol = lyapunov_lsq_solve(p.as_matrix(), &rhs)?;
    let a_tilde = sol.solution.as_matrix();
    let a = SymmetricMatrix::from_matrix(&((a_tilde + a_tilde.transpose()) / 4.0));
    let curvature = a.doubled();
    let b = &g_mean - curvature.as_matrix() * &z_mean;
    let definite = sym_eig(&curvature)?.is_positive_definite();
    let p_rank = sym_eig(&p)?
        .values
        .iter()
        .filter(|&&d| d > p.as_matrix().amax() * (n as f64) * f64::EPSILON)
        .count();
    Ok(QuadraticModel {
        a,
        b,
        fit_residual: sol.residual,
        definite,
        degenerate: p_rank < n,
    })
}

/// The two search directions produced from one fitted model.
#[derive(Debug, Clone)]
pub struct SearchDirections {
    /// Minimizer of the model (non-local Newton direction).
    pub newton: Vector,
    /// `−b`.
    pub neg_b: Vector,
    pub used_trust_region: bool,
}

/// Newton direction `2(A+Aᵀ) Δx = −b` when the curvature is definite,
/// otherwise the trust-region minimizer of the model over `‖Δx‖ ≤ radius`.
pub fn direction(model: &QuadraticModel, trust_radius: f64) -> Result<SearchDirections, QuadfitError> {
    let neg_b = -&model.b;
    if model.definite {
        if let Some(dx) = spd_solve(&model.hessian(), &neg_b) {
            return Ok(SearchDirections {
                newton: dx,
                neg_b,
                used_trust_region: false,
            });
        }
    }
    let dx = trust_region_min(&model.curvature(), &model.b, trust_radius)?;
    Ok(SearchDirections {
        newton: dx,
        neg_b,
        used_trust_region: true,
    })
}
