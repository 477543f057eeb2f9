//! Benchmark objectives with analytic gradients.
//!
//! Every objective is immutable after construction and can be evaluated
//! concurrently. [`by_name`] resolves the registry names used by the CLI.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{sym_eig, Matrix, SymmetricMatrix, Vector};

/// Registry names accepted by [`by_name`].
pub const REGISTRY: &[&str] = &["levy", "salomon", "rcigar", "rcigar-noff", "siam"];

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("unknown objective '{name}' (available: {})", REGISTRY.join(", "))]
    Unknown { name: String },
    #[error("invalid dimension {dim} for {name}: {reason}")]
    Dimension {
        name: &'static str,
        dim: usize,
        reason: &'static str,
    },
    #[error("invalid Rastrigin model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnownMinimum {
    pub value: f64,
    pub location: Option<Vector>,
}

/// A differentiable function `Rⁿ → R` with its analytic gradient.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;

    fn known_minimum(&self) -> Option<KnownMinimum> {
        None
    }

    /// Box `[lo, hi]ⁿ` from which gradient-check probes are drawn.
    fn probe_box(&self) -> (f64, f64) {
        (-10.0, 10.0)
    }
}

/// Resolves a registry name. `siam` ignores `dim` unless it differs from 2.
pub fn by_name(name: &str, dim: usize) -> Result<Box<dyn Objective>, ObjectiveError> {
    Ok(match name {
        "levy" => Box::new(Levy::new(dim)?),
        "salomon" => Box::new(Salomon::new(dim)?),
        "rcigar" => Box::new(Rcigar::new(dim, true)?),
        "rcigar-noff" => Box::new(Rcigar::new(dim, false)?),
        "siam" => {
            if dim != 2 {
                return Err(ObjectiveError::Dimension {
                    name: "siam",
                    dim,
                    reason: "siam is two-dimensional",
                });
            }
            Box::new(Siam)
        }
        _ => {
            return Err(ObjectiveError::Unknown {
                name: name.to_string(),
            })
        }
    })
}

#[derive(Debug, Clone)]
pub struct Levy {
    dim: usize,
}

impl Levy {
    pub fn new(dim: usize) -> Result<Self, ObjectiveError> {
        if dim == 0 {
            return Err(ObjectiveError::Dimension {
                name: "levy",
                dim,
                reason: "need n >= 1",
            });
        }
        Ok(Levy { dim })
    }
}

#[inline]
fn levy_w(x: f64) -> f64 {
    1.0 + (x - 1.0) / 4.0
}

impl Objective for Levy {
    fn name(&self) -> &str {
        "levy"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> f64 {
        let n = self.dim;
        let w1 = levy_w(x[0]);
        let wn = levy_w(x[n - 1]);
        let mut f = (PI * w1).sin().powi(2)
            + (wn - 1.0).powi(2) * (1.0 + (2.0 * PI * wn).sin().powi(2));
        for i in 0..n - 1 {
            let w = levy_w(x[i]);
            f += (w - 1.0).powi(2) * (1.0 + 10.0 * (PI * w + 1.0).sin().powi(2));
        }
        f
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let n = self.dim;
        // All terms are differentiated in w, then scaled by dw/dx = 1/4.
        let mut dw = Vector::zeros(n);
        let w1 = levy_w(x[0]);
        dw[0] += PI * (2.0 * PI * w1).sin();
        let wn = levy_w(x[n - 1]);
        dw[n - 1] += 2.0 * (wn - 1.0) * (1.0 + (2.0 * PI * wn).sin().powi(2))
            + (wn - 1.0).powi(2) * 2.0 * PI * (4.0 * PI * wn).sin();
        for i in 0..n - 1 {
            let w = levy_w(x[i]);
            let arg = PI * w + 1.0;
            dw[i] += 2.0 * (w - 1.0) * (1.0 + 10.0 * arg.sin().powi(2))
                + (w - 1.0).powi(2) * 10.0 * PI * (2.0 * arg).sin();
        }
        dw / 4.0
    }

    fn known_minimum(&self) -> Option<KnownMinimum> {
        Some(KnownMinimum {
            value: 0.0,
            location: Some(Vector::from_element(self.dim, 1.0)),
        })
    }
}

/// `1 − cos(12π‖x‖) + 0.6‖x‖`; the gradient at the origin is taken as zero.
#[derive(Debug, Clone)]
pub struct Salomon {
    dim: usize,
}

impl Salomon {
    pub fn new(dim: usize) -> Result<Self, ObjectiveError> {
        if dim == 0 {
            return Err(ObjectiveError::Dimension {
                name: "salomon",
                dim,
                reason: "need n >= 1",
            });
        }
        Ok(Salomon { dim })
    }
}

impl Objective for Salomon {
    fn name(&self) -> &str {
        "salomon"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector) -> f64 {
        let r = x.norm();
        1.0 - (12.0 * PI * r).cos() + 0.6 * r
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let r = x.norm();
        if r == 0.0 {
            return Vector::zeros(self.dim);
        }
        let dr = 12.0 * PI * (12.0 * PI * r).sin() + 0.6;
        x * (dr / r)
    }

    fn known_minimum(&self) -> Option<KnownMinimum> {
        Some(KnownMinimum {
            value: 0.0,
            location: Some(Vector::zeros(self.dim)),
        })
    }
}

/// Ill-conditioned quadratic with a per-coordinate cosine disturbance:
/// `[a n] + Σ dᵢ xᵢ² − a Σ cos(s xᵢ)` with `dᵢ` linearly spaced on `[1, 100]`.
#[derive(Debug, Clone)]
pub struct Rcigar {
    diag: Vector,
    amplitude: f64,
    frequency: f64,
    with_offset: bool,
}

impl Rcigar {
    pub const AMPLITUDE: f64 = 10.0;
    pub const FREQUENCY: f64 = 20.0 * PI;

    pub fn new(dim: usize, with_offset: bool) -> Result<Self, ObjectiveError> {
        Self::with_params(dim, Self::AMPLITUDE, Self::FREQUENCY, with_offset)
    }

    pub fn with_params(
        dim: usize,
        amplitude: f64,
        frequency: f64,
        with_offset: bool,
    ) -> Result<Self, ObjectiveError> {
        if dim < 2 {
            return Err(ObjectiveError::Dimension {
                name: "rcigar",
                dim,
                reason: "need n >= 2",
            });
        }
        let diag = Vector::from_fn(dim, |i, _| 1.0 + 99.0 * i as f64 / (dim - 1) as f64);
        Ok(Rcigar {
            diag,
            amplitude,
            frequency,
            with_offset,
        })
    }

    /// Hessian of the quadratic part, `2 diag(d)`.
    pub fn quadratic_hessian(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_diagonal(&(&self.diag * 2.0))
    }

    pub fn diagonal(&self) -> &Vector {
        &self.diag
    }
}

impl Objective for Rcigar {
    fn name(&self) -> &str {
        if self.with_offset {
            "rcigar"
        } else {
            "rcigar-noff"
        }
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        let n = self.diag.len();
        let offset = if self.with_offset {
            self.amplitude * n as f64
        } else {
            0.0
        };
        let mut quad = 0.0;
        let mut wave = 0.0;
        for i in 0..n {
            quad += self.diag[i] * x[i] * x[i];
            wave += (self.frequency * x[i]).cos();
        }
        offset + quad - self.amplitude * wave
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.diag.len(), |i, _| {
            2.0 * self.diag[i] * x[i]
                + self.amplitude * self.frequency * (self.frequency * x[i]).sin()
        })
    }

    fn known_minimum(&self) -> Option<KnownMinimum> {
        let n = self.diag.len();
        let value = if self.with_offset {
            0.0
        } else {
            -self.amplitude * n as f64
        };
        Some(KnownMinimum {
            value,
            location: Some(Vector::zeros(n)),
        })
    }
}

/// Problem 4 of the SIAM hundred-digit challenge.
#[derive(Debug, Clone, Copy, Default)]
pub struct Siam;

impl Siam {
    /// Global minimum value as printed to twelve decimals.
    pub const MIN_VALUE: f64 = -3.306868647475;
    /// Global minimizer, Newton-refined from `(−0.0244, 0.2106)`.
    pub const MIN_LOCATION: [f64; 2] = [-0.024_403_079_694_375_17, 0.210_612_427_155_356_8];
}

impl Objective for Siam {
    fn name(&self) -> &str {
        "siam"
    }

    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &Vector) -> f64 {
        let (x1, x2) = (x[0], x[1]);
        (50.0 * x1).sin().exp() + (60.0 * x2.exp()).sin() + (70.0 * x1.sin()).sin()
            + (80.0 * x2).sin().sin()
            - (10.0 * (x1 + x2)).sin()
            + (x1 * x1 + x2 * x2) / 4.0
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let (x1, x2) = (x[0], x[1]);
        let shared = 10.0 * (10.0 * (x1 + x2)).cos();
        let g1 = 50.0 * (50.0 * x1).sin().exp() * (50.0 * x1).cos()
            + 70.0 * (70.0 * x1.sin()).cos() * x1.cos()
            - shared
            + x1 / 2.0;
        let e2 = x2.exp();
        let g2 = 60.0 * e2 * (60.0 * e2).cos() + 80.0 * (80.0 * x2).sin().cos() * (80.0 * x2).cos()
            - shared
            + x2 / 2.0;
        Vector::from_vec(vec![g1, g2])
    }

    fn known_minimum(&self) -> Option<KnownMinimum> {
        Some(KnownMinimum {
            value: Self::MIN_VALUE,
            location: Some(Vector::from_column_slice(&Self::MIN_LOCATION)),
        })
    }

    fn probe_box(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
}

/// A convex quadratic `r(x) = ⟨x, R x⟩` plus `g(x) = Σ aⱼ cos(⟨sⱼ, x⟩ + ψⱼ)`,
/// together with the Gaussian kernel shape `Σ` used in residual bounds.
#[derive(Debug, Clone)]
pub struct RastriginModel {
    r_hessian_half: SymmetricMatrix,
    amplitudes: Vector,
    frequencies: Matrix,
    phases: Vector,
    kernel: SymmetricMatrix,
    separation: f64,
}

impl RastriginModel {
    pub fn new(
        r_hessian_half: SymmetricMatrix,
        amplitudes: Vector,
        frequencies: Matrix,
        phases: Vector,
        kernel: SymmetricMatrix,
    ) -> Result<Self, ObjectiveError> {
        let n = r_hessian_half.order();
        let m = amplitudes.len();
        if frequencies.nrows() != n || frequencies.ncols() != m {
            return Err(ObjectiveError::InvalidModel(format!(
                "frequency matrix is {}x{}, expected {n}x{m}",
                frequencies.nrows(),
                frequencies.ncols()
            )));
        }
        if phases.len() != m {
            return Err(ObjectiveError::InvalidModel(format!(
                "{} phases for {m} terms",
                phases.len()
            )));
        }
        if kernel.order() != n {
            return Err(ObjectiveError::InvalidModel("kernel order differs from n".into()));
        }
        let kernel_pd = sym_eig(&kernel)
            .map(|e| e.is_positive_definite())
            .unwrap_or(false);
        if !kernel_pd {
            return Err(ObjectiveError::InvalidModel(
                "kernel is not positive definite".into(),
            ));
        }
        let separation = separation(&frequencies, &kernel);
        if !(separation > 0.0) {
            return Err(ObjectiveError::InvalidModel(
                "frequency separation is zero".into(),
            ));
        }
        Ok(RastriginModel {
            r_hessian_half,
            amplitudes,
            frequencies,
            phases,
            kernel,
            separation,
        })
    }

    /// Random model with `n`-dimensional frequencies, `m` terms, a random
    /// convex quadratic and a random positive definite kernel.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self, ObjectiveError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let l = Matrix::from_fn(n, n, |_, _| uniform(-1.0, 1.0));
        let r = SymmetricMatrix::from_matrix(&(&l * l.transpose() + Matrix::identity(n, n) * 0.1));
        let amplitudes = Vector::from_fn(m, |_, _| uniform(-2.0, 2.0));
        let frequencies = Matrix::from_fn(n, m, |_, _| uniform(-3.0, 3.0));
        let phases = Vector::from_fn(m, |_, _| uniform(0.0, 2.0 * PI));
        let c = Matrix::from_fn(n, n, |_, _| uniform(-1.0, 1.0));
        let kernel =
            SymmetricMatrix::from_matrix(&(&c * c.transpose() + Matrix::identity(n, n) * 0.5));
        Self::new(r, amplitudes, frequencies, phases, kernel)
    }

    pub fn dim(&self) -> usize {
        self.r_hessian_half.order()
    }

    pub fn terms(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn r_hessian_half(&self) -> &SymmetricMatrix {
        &self.r_hessian_half
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn frequencies(&self) -> &Matrix {
        &self.frequencies
    }

    pub fn phases(&self) -> &Vector {
        &self.phases
    }

    pub fn kernel(&self) -> &SymmetricMatrix {
        &self.kernel
    }

    /// `min_{j≠ℓ} min(‖sⱼ + s_ℓ‖_Σ, ‖sⱼ − s_ℓ‖_Σ)`; infinite for a single term.
    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn quadratic_value(&self, x: &Vector) -> f64 {
        self.r_hessian_half.quad_form(x)
    }

    pub fn disturbance_value(&self, x: &Vector) -> f64 {
        let proj = self.frequencies.transpose() * x;
        (0..self.terms())
            .map(|j| self.amplitudes[j] * (proj[j] + self.phases[j]).cos())
            .sum()
    }

    /// `∇g(x) = −Σ aⱼ sin(⟨sⱼ, x⟩ + ψⱼ) sⱼ`.
    pub fn disturbance_gradient(&self, x: &Vector) -> Vector {
        let proj = self.frequencies.transpose() * x;
        let weights = Vector::from_fn(self.terms(), |j, _| {
            -self.amplitudes[j] * (proj[j] + self.phases[j]).sin()
        });
        &self.frequencies * weights
    }
}

fn separation(frequencies: &Matrix, kernel: &SymmetricMatrix) -> f64 {
    let m = frequencies.ncols();
    let kernel_norm = |v: Vector| kernel.quad_form(&v).max(0.0).sqrt();
    let mut eps = f64::INFINITY;
    for j in 0..m {
        for l in 0..m {
            if j == l {
                continue;
            }
            let sj = frequencies.column(j);
            let sl = frequencies.column(l);
            eps = eps
                .min(kernel_norm(sj + sl))
                .min(kernel_norm(sj - sl));
        }
    }
    eps
}

/// `f = r + g` built from a [`RastriginModel`].
#[derive(Debug, Clone)]
pub struct RastriginObjective {
    model: RastriginModel,
}

pub fn rastrigin_model_objective(model: RastriginModel) -> RastriginObjective {
    RastriginObjective { model }
}

impl RastriginObjective {
    pub fn model(&self) -> &RastriginModel {
        &self.model
    }
}

impl Objective for RastriginObjective {
    fn name(&self) -> &str {
        "rastrigin-model"
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.model.quadratic_value(x) + self.model.disturbance_value(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.model.r_hessian_half.as_matrix() * x * 2.0 + self.model.disturbance_gradient(x)
    }
}

#[derive(Debug, Clone)]
pub struct GradientReport {
    pub max_rel_error: f64,
    pub worst_point: Vector,
    pub trials: usize,
}

#[derive(Debug, Error)]
pub enum GradientCheckError {
    #[error("need at least one trial")]
    NoTrials,
    #[error("non-finite value or gradient of {name} at {point:?}")]
    NonFinite { name: String, point: Vec<f64> },
}

/// Compares the analytic gradient with central finite differences
/// (`h = 1e-6 · max(1, ‖x‖)`) at `trials` seeded points from the objective's
/// probe box. Relative error is `‖g − g_fd‖ / max(‖g_fd‖, 1)`.
pub fn check_gradient(
    f: &dyn Objective,
    trials: usize,
    seed: u64,
) -> Result<GradientReport, GradientCheckError> {
    if trials == 0 {
        return Err(GradientCheckError::NoTrials);
    }
    let n = f.dim();
    let (lo, hi) = f.probe_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GradientReport {
        max_rel_error: 0.0,
        worst_point: Vector::zeros(n),
        trials,
    };
    for _ in 0..trials {
        let x = Vector::from_fn(n, |_, _| rng.random_range(lo..hi));
        let non_finite = || GradientCheckError::NonFinite {
            name: f.name().to_string(),
            point: x.as_slice().to_vec(),
        };
        let g = f.gradient(&x);
        if !f.value(&x).is_finite() || !g.iter().all(|v| v.is_finite()) {
            return Err(non_finite());
        }
        let h = 1e-6 * x.norm().max(1.0);
        let mut fd = Vector::zeros(n);
        let mut probe = x.clone();
        for i in 0..n {
            probe[i] = x[i] + h;
            let up = f.value(&probe);
            probe[i] = x[i] - h;
            let down = f.value(&probe);
            probe[i] = x[i];
            if !up.is_finite() || !down.is_finite() {
                return Err(non_finite());
            }
            fd[i] = (up - down) / (2.0 * h);
        }
        let rel = (&g - &fd).norm() / fd.norm().max(1.0);
        if rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.worst_point = x.clone();
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Miscalibrated(Levy);

    impl Objective for Miscalibrated {
        fn name(&self) -> &str {
            "miscalibrated"
        }
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn value(&self, x: &Vector) -> f64 {
            self.0.value(x)
        }
        fn gradient(&self, x: &Vector) -> Vector {
            let mut g = self.0.gradient(x);
            g[0] *= 1.1;
            g
        }
    }

    #[test]
    fn levy_at_minimum() {
        let f = Levy::new(50).unwrap();
        assert!(f.value(&Vector::from_element(50, 1.0)).abs() < 1e-30);
    }

    #[test]
    fn levy_one_dimensional_origin() {
        // sin²(3π/4) + (−1/4)²(1 + sin²(3π/2)) = 1/2 + 1/8
        let f = Levy::new(1).unwrap();
        assert!((f.value(&Vector::zeros(1)) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn salomon_values() {
        let f = Salomon::new(3).unwrap();
        assert_eq!(f.value(&Vector::zeros(3)), 0.0);
        assert_eq!(f.gradient(&Vector::zeros(3)), Vector::zeros(3));
        let x = Vector::from_vec(vec![1.0 / 6.0, 0.0, 0.0]);
        assert!((f.value(&x) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn rcigar_values() {
        let f = Rcigar::new(20, true).unwrap();
        assert!(f.value(&Vector::zeros(20)).abs() < 1e-12);
        let g = Rcigar::new(20, false).unwrap();
        assert!((g.value(&Vector::zeros(20)) + 200.0).abs() < 1e-12);
        assert_eq!(g.diagonal()[0], 1.0);
        assert_eq!(g.diagonal()[19], 100.0);
        assert!(Rcigar::new(1, true).is_err());
    }

    #[test]
    fn siam_known_minimum() {
        let f = Siam;
        let x = Vector::from_column_slice(&Siam::MIN_LOCATION);
        assert!(f.value(&x) - Siam::MIN_VALUE <= 1e-10);
        assert!((f.value(&x) - Siam::MIN_VALUE).abs() < 1e-11);
    }

    #[test]
    fn siam_location_refines_printed_digits() {
        // Newton from the printed four-decimal location using a
        // finite-difference Hessian of the analytic gradient.
        let f = Siam;
        let mut x = Vector::from_vec(vec![-0.0244, 0.2106]);
        for _ in 0..20 {
            let g = f.gradient(&x);
            let h = 1e-7;
            let mut hess = Matrix::zeros(2, 2);
            for j in 0..2 {
                let mut up = x.clone();
                up[j] += h;
                let mut dn = x.clone();
                dn[j] -= h;
                hess.set_column(j, &((f.gradient(&up) - f.gradient(&dn)) / (2.0 * h)));
            }
            let step = hess.lu().solve(&g).unwrap();
            x -= step;
        }
        assert!(f.gradient(&x).norm() < 1e-10);
        let stored = Vector::from_column_slice(&Siam::MIN_LOCATION);
        assert!((x - stored).norm() < 1e-13);
    }

    #[test]
    fn shipped_gradients_match_finite_differences() {
        let objectives: Vec<Box<dyn Objective>> = vec![
            Box::new(Levy::new(10).unwrap()),
            Box::new(Levy::new(1).unwrap()),
            Box::new(Salomon::new(3).unwrap()),
            Box::new(Rcigar::new(50, true).unwrap()),
            Box::new(Rcigar::new(20, false).unwrap()),
            Box::new(Siam),
        ];
        for f in &objectives {
            let rep = check_gradient(f.as_ref(), 100, 11).unwrap();
            assert!(rep.max_rel_error <= 1e-5, "{}: {}", f.name(), rep.max_rel_error);
        }
    }

    #[test]
    fn planted_gradient_bug_is_detected() {
        let f = Miscalibrated(Levy::new(10).unwrap());
        let rep = check_gradient(&f, 20, 3).unwrap();
        assert!(rep.max_rel_error > 1e-2);
    }

    #[test]
    fn non_finite_is_reported() {
        struct Broken;
        impl Objective for Broken {
            fn name(&self) -> &str {
                "broken"
            }
            fn dim(&self) -> usize {
                2
            }
            fn value(&self, _: &Vector) -> f64 {
                f64::NAN
            }
            fn gradient(&self, _: &Vector) -> Vector {
                Vector::zeros(2)
            }
        }
        assert!(matches!(
            check_gradient(&Broken, 3, 0),
            Err(GradientCheckError::NonFinite { .. })
        ));
        assert!(matches!(check_gradient(&Broken, 0, 0), Err(GradientCheckError::NoTrials)));
    }

    #[test]
    fn check_gradient_is_deterministic() {
        let f = Levy::new(4).unwrap();
        let a = check_gradient(&f, 10, 9).unwrap();
        let b = check_gradient(&f, 10, 9).unwrap();
        assert_eq!(a.max_rel_error, b.max_rel_error);
        assert_eq!(a.worst_point, b.worst_point);
    }

    #[test]
    fn registry_resolves_all_names() {
        for name in REGISTRY {
            let dim = if *name == "siam" { 2 } else { 5 };
            let f = by_name(name, dim).unwrap();
            assert_eq!(f.name(), *name);
            assert_eq!(f.dim(), dim);
        }
        let err = by_name("rosenbrock", 2).err().unwrap();
        assert!(err.to_string().contains("levy"));
        assert!(by_name("siam", 3).is_err());
    }

    #[test]
    fn known_minima_are_lower_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let objectives: Vec<Box<dyn Objective>> = vec![
            Box::new(Levy::new(5).unwrap()),
            Box::new(Salomon::new(5).unwrap()),
            Box::new(Rcigar::new(5, true).unwrap()),
        ];
        for f in &objectives {
            let km = f.known_minimum().unwrap();
            let at = f.value(km.location.as_ref().unwrap());
            assert!(at <= 1e-12, "{}", f.name());
            for _ in 0..100_000 {
                let x = Vector::from_fn(5, |_, _| rng.random_range(-10.0..10.0));
                assert!(f.value(&x) >= km.value - 1e-12, "{}", f.name());
            }
        }
    }

    #[test]
    fn rastrigin_single_cosine() {
        let model = RastriginModel::new(
            SymmetricMatrix::zeros(2),
            Vector::from_vec(vec![1.0]),
            Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
            Vector::zeros(1),
            SymmetricMatrix::identity(2),
        )
        .unwrap();
        assert!(model.separation().is_infinite());
        let f = rastrigin_model_objective(model);
        let x = Vector::from_vec(vec![0.7, -3.0]);
        assert!((f.value(&x) - 0.7_f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn rastrigin_zero_amplitude_is_quadratic() {
        let base = RastriginModel::random(4, 5, 8).unwrap();
        let model = RastriginModel::new(
            base.r_hessian_half().clone(),
            Vector::zeros(5),
            base.frequencies().clone(),
            base.phases().clone(),
            base.kernel().clone(),
        )
        .unwrap();
        let f = rastrigin_model_objective(model.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = Vector::from_fn(4, |_, _| rng.random_range(-5.0..5.0));
            assert_eq!(f.value(&x), model.quadratic_value(&x));
        }
    }

    #[test]
    fn rastrigin_gradient_check() {
        for seed in 0..5 {
            let f = rastrigin_model_objective(RastriginModel::random(3, 4, seed).unwrap());
            let rep = check_gradient(&f, 100, seed).unwrap();
            assert!(rep.max_rel_error <= 1e-5);
        }
    }

    #[test]
    fn rastrigin_rejects_invalid_models() {
        let s = Matrix::from_column_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let err = RastriginModel::new(
            SymmetricMatrix::identity(2),
            Vector::from_vec(vec![1.0, 1.0]),
            s,
            Vector::zeros(2),
            SymmetricMatrix::identity(2),
        );
        assert!(matches!(err, Err(ObjectiveError::InvalidModel(_))));
        let err = RastriginModel::new(
            SymmetricMatrix::identity(2),
            Vector::from_vec(vec![1.0]),
            Matrix::from_column_slice(2, 1, &[1.0, 0.0]),
            Vector::zeros(1),
            SymmetricMatrix::from_diagonal(&Vector::from_vec(vec![1.0, -1.0])),
        );
        assert!(matches!(err, Err(ObjectiveError::InvalidModel(_))));
    }
}
