#![allow(dead_code)]

use nlqn::linalg::{Matrix, SymmetricMatrix, Vector};
use nlqn::Objective;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `f(x) = ⟨x, D x⟩ + cᵀx` with `D` symmetric positive definite.
pub struct ConvexQuadratic {
    pub d: SymmetricMatrix,
    pub c: Vector,
}

impl ConvexQuadratic {
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let d = SymmetricMatrix::from_matrix(&(&l * l.transpose() + Matrix::identity(n, n) * 0.5));
        let c = Vector::from_fn(n, |_, _| rng.random_range(-5.0..5.0));
        ConvexQuadratic { d, c }
    }

    pub fn hessian(&self) -> SymmetricMatrix {
        self.d.doubled()
    }

    pub fn minimizer(&self) -> Vector {
        -self.hessian().as_matrix().clone().lu().solve(&self.c).unwrap()
    }

    pub fn min_value(&self) -> f64 {
        self.value(&self.minimizer())
    }
}

impl Objective for ConvexQuadratic {
    fn name(&self) -> &str {
        "convex-quadratic"
    }

    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.d.quad_form(x) + self.c.dot(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.d.as_matrix() * x * 2.0 + &self.c
    }
}

/// Random symmetric matrix with entries in `[−scale, scale]`.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SymmetricMatrix {
    SymmetricMatrix::from_matrix(&Matrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale)))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

pub fn relative_frobenius(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).norm() / b.norm()
}
