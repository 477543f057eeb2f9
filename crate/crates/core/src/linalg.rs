//! Dense linear-algebra kernels: symmetric eigendecomposition, the
//! symmetric least-squares solve of `X P + Pᵀ X = Q`, and the
//! trust-region subproblem for a possibly indefinite quadratic.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

const EIG_MAX_ITER: usize = 10_000;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),
    #[error("numerical failure in {0}")]
    NumericalFailure(&'static str),
}

/// A square matrix whose entries satisfy `m[(i, j)] == m[(j, i)]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(Matrix);

impl SymmetricMatrix {
    /// Symmetrizes `m` as `(m + mᵀ) / 2`.
    ///
    /// Panics if `m` is not square.
    pub fn from_matrix(m: &Matrix) -> Self {
        assert!(m.is_square(), "SymmetricMatrix requires a square matrix");
        let n = m.nrows();
        let mut out = Matrix::zeros(n, n);
        for j in 0..n {
            out[(j, j)] = m[(j, j)];
            for i in (j + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        SymmetricMatrix(out)
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(Matrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix(Matrix::zeros(n, n))
    }

    pub fn from_diagonal(d: &Vector) -> Self {
        SymmetricMatrix(Matrix::from_diagonal(d))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        SymmetricMatrix(&self.0 * s)
    }

    /// `self + selfᵀ`, i.e. `2 · self`.
    pub fn doubled(&self) -> Self {
        self.scale(2.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Quadratic form `⟨x, M x⟩`.
    pub fn quad_form(&self, x: &Vector) -> f64 {
        x.dot(&(&self.0 * x))
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vector,
    pub vectors: Matrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Minimum eigenvalue exceeds `1e-10 · max(1, |maximum eigenvalue|)`.
    pub fn is_positive_definite(&self) -> bool {
        self.min() > 1e-10 * self.max().abs().max(1.0)
    }
}

pub fn sym_eig(m: &SymmetricMatrix) -> Result<Eigen, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite("sym_eig"));
    }
    let n = m.order();
    if n == 0 {
        return Ok(Eigen {
            values: Vector::zeros(0),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, EIG_MAX_ITER)
        .ok_or(LinalgError::NumericalFailure("sym_eig"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Eigen { values, vectors })
}

/// Whether `m` passes the scale-relative positive-definiteness test.
pub fn is_positive_definite(m: &SymmetricMatrix) -> Result<bool, LinalgError> {
    Ok(sym_eig(m)?.is_positive_definite())
}

/// Result of [`lyapunov_lsq_solve`].
#[derive(Debug, Clone)]
pub struct LyapunovSolution {
    pub solution: SymmetricMatrix,
    /// `‖X P + Pᵀ X − Q‖_F` at the returned `X`.
    pub residual: f64,
    /// Numerical rank of the operator `X ↦ X P + Pᵀ X` on symmetric matrices.
    pub rank: usize,
}

/// Residual `‖X P + Pᵀ X − Q‖_F`.
pub fn lyapunov_residual(x: &SymmetricMatrix, p: &Matrix, q: &SymmetricMatrix) -> f64 {
    let xp = x.as_matrix() * p;
    (&xp + xp.transpose() - q.as_matrix()).norm()
}

/// Minimal-Frobenius-norm least-squares solution over symmetric `X` of
/// `X P + Pᵀ X = Q`.
///
/// When `p` is exactly symmetric the operator is diagonal in the eigenbasis
/// of `p` and the solve is done spectrally in O(n³). Otherwise the operator
/// is vectorized into an `n² × n(n+1)/2` system and solved with an SVD
/// pseudoinverse. Both paths use the same relative rank cutoff.
pub fn lyapunov_lsq_solve(p: &Matrix, q: &SymmetricMatrix) -> Result<LyapunovSolution, LinalgError> {
    let n = q.order();
    if p.nrows() != n || p.ncols() != n {
        return Err(LinalgError::Dimension(format!(
            "p is {}x{}, q is {n}x{n}",
            p.nrows(),
            p.ncols()
        )));
    }
    if !p.iter().all(|v| v.is_finite()) || !q.is_finite() {
        return Err(LinalgError::NonFinite("lyapunov_lsq_solve"));
    }
    if n == 0 {
        return Ok(LyapunovSolution {
            solution: SymmetricMatrix::zeros(0),
            residual: 0.0,
            rank: 0,
        });
    }
    let (solution, rank) = if p == &p.transpose() {
        lyapunov_spectral(&SymmetricMatrix(p.clone()), q)?
    } else {
        lyapunov_vectorized(p, q)?
    };
    let residual = lyapunov_residual(&solution, p, q);
    Ok(LyapunovSolution {
        solution,
        residual,
        rank,
    })
}

fn rank_cutoff(largest: f64, n: usize) -> f64 {
    largest * (n * n) as f64 * f64::EPSILON
}

fn lyapunov_spectral(
    p: &SymmetricMatrix,
    q: &SymmetricMatrix,
) -> Result<(SymmetricMatrix, usize), LinalgError> {
    let n = p.order();
    let eig = sym_eig(p)?;
    let u = &eig.vectors;
    let d = &eig.values;
    let q_rot = u.transpose() * q.as_matrix() * u;
    let largest = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (d[i] + d[j]).abs())
        .fold(0.0, f64::max);
    let cutoff = rank_cutoff(largest, n);
    let mut x_rot = Matrix::zeros(n, n);
    let mut rank = 0;
    for j in 0..n {
        for i in j..n {
            let s = d[i] + d[j];
            if s.abs() > cutoff {
                if i == j {
                    rank += 1;
                    x_rot[(i, i)] = q_rot[(i, i)] / s;
                } else {
                    rank += 1;
                    let v = 0.5 * (q_rot[(i, j)] + q_rot[(j, i)]) / s;
                    x_rot[(i, j)] = v;
                    x_rot[(j, i)] = v;
                }
            }
        }
    }
    let x = u * x_rot * u.transpose();
    Ok((SymmetricMatrix::from_matrix(&x), rank))
}

/// Orthonormal basis index pairs `(i, j)` with `i ≤ j` in the symmetric subspace.
fn sym_basis(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for i in 0..=j {
            out.push((i, j));
        }
    }
    out
}

fn lyapunov_vectorized(
    p: &Matrix,
    q: &SymmetricMatrix,
) -> Result<(SymmetricMatrix, usize), LinalgError> {
    let n = p.nrows();
    let basis = sym_basis(n);
    let mut op = Matrix::zeros(n * n, basis.len());
    for (col, &(i, j)) in basis.iter().enumerate() {
        // E = (e_i e_jᵀ + e_j e_iᵀ)/√2 for i ≠ j, e_i e_iᵀ on the diagonal.
        let w = if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
        let mut e = Matrix::zeros(n, n);
        e[(i, j)] = w;
        e[(j, i)] = w;
        let ep = &e * p;
        let image = &ep + ep.transpose();
        op.set_column(col, &Vector::from_column_slice(image.as_slice()));
    }
    let rhs = Vector::from_column_slice(q.as_matrix().as_slice());
    let svd = op.svd(true, true);
    let largest = svd.singular_values.max();
    let cutoff = rank_cutoff(largest, n);
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let coeffs = svd
        .solve(&rhs, cutoff)
        .map_err(|_| LinalgError::NumericalFailure("lyapunov_lsq_solve"))?;
    let mut x = Matrix::zeros(n, n);
    for (c, &(i, j)) in coeffs.iter().zip(&basis) {
        if i == j {
            x[(i, i)] = *c;
        } else {
            let v = c * std::f64::consts::FRAC_1_SQRT_2;
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    Ok((SymmetricMatrix(x), rank))
}

/// Minimizes `⟨x, a x⟩ + bᵀx` over `‖x‖ ≤ radius`, where `a` plays the role
/// of `A + Aᵀ` and may be indefinite.
///
/// The gradient of the objective is `2 a x + b`, so the KKT system reads
/// `(2a + 2λI) x = −b` with `λ ≥ 0` and `2a + 2λI` positive semidefinite.
/// Solved in the eigenbasis of `a` with a safeguarded Newton iteration on the
/// secular equation `1/‖x(λ)‖ = 1/radius`; the hard case adds a multiple of
/// the lowest eigenvector to reach the boundary.
pub fn trust_region_min(a: &SymmetricMatrix, b: &Vector, radius: f64) -> Result<Vector, LinalgError> {
    let n = a.order();
    if b.len() != n {
        return Err(LinalgError::Dimension(format!(
            "a is {n}x{n}, b has {} entries",
            b.len()
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(LinalgError::Dimension(format!("radius must be positive, got {radius}")));
    }
    if !a.is_finite() || !b.iter().all(|v| v.is_finite()) {
        return Err(LinalgError::NonFinite("trust_region_min"));
    }
    if n == 0 {
        return Ok(Vector::zeros(0));
    }
    let eig = sym_eig(a)?;
    // Work with H = 2a in the eigenbasis: h_i = 2 λ_i, c = Qᵀ b.
    let h: Vec<f64> = eig.values.iter().map(|v| 2.0 * v).collect();
    let c = eig.vectors.transpose() * b;
    let b_norm = b.norm();
    let h_scale = h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if b_norm == 0.0 && h_scale == 0.0 {
        return Ok(Vector::zeros(n));
    }
    let h_tol = 1e-12 * h_scale.max(f64::MIN_POSITIVE);
    let c_tol = 1e-12 * b_norm;
    let h_min = h[0];

    let step_at = |lambda: f64, skip_min: bool| -> Vector {
        let mut y = Vector::zeros(n);
        for i in 0..n {
            let denom = h[i] + lambda;
            if skip_min && (h[i] - h_min).abs() <= h_tol {
                continue;
            }
            if denom.abs() > h_tol && c[i].abs() > 0.0 {
                y[i] = -c[i] / denom;
            }
        }
        y
    };

    // Interior solution with λ = 0 if the model is convex and the
    // (pseudo-)Newton point is feasible and solves the stationarity system.
    if h_min >= -h_tol {
        let unbounded = (0..n).any(|i| h[i].abs() <= h_tol && c[i].abs() > c_tol);
        if !unbounded {
            let y = step_at(0.0, false);
            if y.norm() <= radius {
                return Ok(&eig.vectors * y);
            }
        }
    }

    let lambda_lo = (-h_min).max(0.0);
    let hard_case = (0..n)
        .filter(|&i| (h[i] - h_min).abs() <= h_tol)
        .all(|i| c[i].abs() <= c_tol);
    if hard_case && lambda_lo > 0.0 {
        let y = step_at(lambda_lo, true);
        let y_norm = y.norm();
        if y_norm <= radius {
            let tau = (radius * radius - y_norm * y_norm).max(0.0).sqrt();
            let v = eig.vectors.column(0).into_owned();
            let base = &eig.vectors * y;
            let plus = &base + &v * tau;
            let minus = &base - &v * tau;
            return Ok(lexicographic_min(plus, minus));
        }
    }

    // Boundary solution: find λ > λ_lo with ‖x(λ)‖ = radius.
    let norm_at = |lambda: f64| step_at(lambda, false).norm();
    let mut lo = lambda_lo;
    let mut hi = (b_norm / radius - h_min).max(lambda_lo) + 1e-12 * (1.0 + lambda_lo);
    while norm_at(hi) > radius {
        hi = 2.0 * hi + 1.0;
        if !hi.is_finite() {
            return Err(LinalgError::NumericalFailure("trust_region_min"));
        }
    }
    let mut lambda = hi;
    for _ in 0..200 {
        let y = step_at(lambda, false);
        let y_norm = y.norm();
        if (y_norm - radius).abs() <= 1e-14 * radius {
            break;
        }
        if y_norm > radius {
            lo = lambda;
        } else {
            hi = lambda;
        }
        // Newton step on φ(λ) = 1/‖y‖ − 1/radius, where
        // d‖y‖/dλ = −Σ y_i² / (h_i + λ) / ‖y‖.
        let dnorm: f64 = -(0..n)
            .filter(|&i| y[i] != 0.0)
            .map(|i| y[i] * y[i] / (h[i] + lambda))
            .sum::<f64>()
            / y_norm;
        let phi = 1.0 / y_norm - 1.0 / radius;
        let dphi = -dnorm / (y_norm * y_norm);
        let newton = lambda - phi / dphi;
        lambda = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    let mut x = &eig.vectors * step_at(lambda, false);
    let x_norm = x.norm();
    if x_norm > radius {
        x *= radius / x_norm;
    }
    Ok(x)
}

fn lexicographic_min(a: Vector, b: Vector) -> Vector {
    for (u, v) in a.iter().zip(b.iter()) {
        if u < v {
            return a;
        }
        if v < u {
            return b;
        }
    }
    a
}

/// Solves `m x = rhs` for symmetric positive definite `m` by Cholesky.
pub fn spd_solve(m: &SymmetricMatrix, rhs: &Vector) -> Option<Vector> {
    let chol = m.as_matrix().clone().cholesky()?;
    let x = chol.solve(rhs);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymmetricMatrix {
        SymmetricMatrix::from_matrix(&random_matrix(rng, n, n))
    }

    #[test]
    fn symmetrization_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_sym(&mut rng, 7);
        assert_eq!(s.as_matrix(), &s.as_matrix().transpose());
    }

    #[test]
    fn eig_identity() {
        let e = sym_eig(&SymmetricMatrix::identity(3)).unwrap();
        for v in e.values.iter() {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eig_diagonal_sorted() {
        let d = SymmetricMatrix::from_diagonal(&Vector::from_vec(vec![4.0, 1.0]));
        let e = sym_eig(&d).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 4.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-15);
        assert!(e.vectors[(0, 0)].abs() < 1e-15);
    }

    #[test]
    fn eig_reconstruction_up_to_order_100() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 2, 5, 17, 100] {
            let m = random_sym(&mut rng, n);
            let e = sym_eig(&m).unwrap();
            let q = &e.vectors;
            let rebuilt = q * Matrix::from_diagonal(&e.values) * q.transpose();
            let rel = (rebuilt - m.as_matrix()).norm() / m.as_matrix().norm();
            assert!(rel <= 1e-10, "n={n}: reconstruction {rel}");
            let ortho = (q * q.transpose() - Matrix::identity(n, n)).norm();
            assert!(ortho <= 1e-10 * n as f64, "n={n}: orthogonality {ortho}");
            assert!(e.values.as_slice().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_rejects_nan() {
        let mut m = Matrix::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        m[(1, 0)] = f64::NAN;
        assert!(matches!(
            sym_eig(&SymmetricMatrix::from_matrix(&m)),
            Err(LinalgError::NonFinite(_))
        ));
    }

    #[test]
    fn positive_definite_threshold_is_scale_relative() {
        let d = SymmetricMatrix::from_diagonal(&Vector::from_vec(vec![1e-6, 1e3]));
        assert!(is_positive_definite(&d).unwrap());
        let d = SymmetricMatrix::from_diagonal(&Vector::from_vec(vec![1e-8, 1e3]));
        assert!(!is_positive_definite(&d).unwrap());
        let d = SymmetricMatrix::from_diagonal(&Vector::from_vec(vec![0.0, 1.0]));
        assert!(!is_positive_definite(&d).unwrap());
    }

    #[test]
    fn lyapunov_scalar() {
        let p = Matrix::from_element(1, 1, 2.0);
        let q = SymmetricMatrix::from_matrix(&Matrix::from_element(1, 1, 6.0));
        let s = lyapunov_lsq_solve(&p, &q).unwrap();
        assert!((s.solution[(0, 0)] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn lyapunov_identity_halves_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_sym(&mut rng, 5);
        let s = lyapunov_lsq_solve(&Matrix::identity(5, 5), &q).unwrap();
        assert!((s.solution.as_matrix() - q.as_matrix() / 2.0).norm() < 1e-14);
    }

    #[test]
    fn lyapunov_roundtrip_general_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = random_matrix(&mut rng, 4, 4);
            let x0 = random_sym(&mut rng, 4);
            let xp = x0.as_matrix() * &p;
            let q = SymmetricMatrix::from_matrix(&(&xp + xp.transpose()));
            let s = lyapunov_lsq_solve(&p, &q).unwrap();
            assert!((s.solution.as_matrix() - x0.as_matrix()).norm() < 1e-8);
            assert!(s.residual <= 1e-8 * (q.as_matrix().norm() + 1.0));
        }
    }

    #[test]
    fn spectral_and_vectorized_paths_agree() {
        // Symmetric PSD rank-deficient p: both routes must give the same
        // minimal-norm least-squares solution.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in [2, 3, 6, 9] {
            let z = random_matrix(&mut rng, 5, k);
            let p = SymmetricMatrix::from_matrix(&(&z * z.transpose()));
            let q = random_sym(&mut rng, 5);
            let (spec, r1) = lyapunov_spectral(&p, &q).unwrap();
            let (vect, r2) = lyapunov_vectorized(p.as_matrix(), &q).unwrap();
            assert_eq!(r1, r2, "k={k}");
            let diff = (spec.as_matrix() - vect.as_matrix()).norm();
            assert!(diff <= 1e-8 * (1.0 + vect.as_matrix().norm()), "k={k}: {diff}");
        }
    }

    #[test]
    fn lyapunov_rank_deficient_is_least_squares_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let z = random_matrix(&mut rng, 4, 2);
        let p = &z * z.transpose();
        let q = random_sym(&mut rng, 4);
        let s = lyapunov_lsq_solve(&p, &q).unwrap();
        assert!(s.rank < 10);
        for _ in 0..100 {
            let mut e = random_sym(&mut rng, 4).into_matrix();
            e *= 1e-3 / e.norm();
            let pert = SymmetricMatrix::from_matrix(&(s.solution.as_matrix() + e));
            assert!(lyapunov_residual(&pert, &p, &q) >= s.residual - 1e-12);
        }
    }

    #[test]
    fn trust_region_interior() {
        let x = trust_region_min(
            &SymmetricMatrix::identity(2),
            &Vector::from_vec(vec![-1.0, 0.0]),
            1.0,
        )
        .unwrap();
        assert!((x - Vector::from_vec(vec![0.5, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn trust_region_concave() {
        let x = trust_region_min(
            &SymmetricMatrix::identity(2).scale(-1.0),
            &Vector::from_vec(vec![0.0, -2.0]),
            1.0,
        )
        .unwrap();
        assert!((x - Vector::from_vec(vec![0.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn trust_region_zero_problem() {
        let x = trust_region_min(&SymmetricMatrix::zeros(3), &Vector::zeros(3), 1.0).unwrap();
        assert_eq!(x, Vector::zeros(3));
    }

    #[test]
    fn trust_region_hard_case_is_deterministic() {
        // b orthogonal to the lowest eigenvector: boundary reached along ±e₁,
        // tie broken toward the lexicographically smaller point.
        let a = SymmetricMatrix::from_diagonal(&Vector::from_vec(vec![-1.0, 2.0]));
        let b = Vector::from_vec(vec![0.0, -1.0]);
        let x = trust_region_min(&a, &b, 1.0).unwrap();
        assert!((x.norm() - 1.0).abs() < 1e-12);
        assert!(x[0] < 0.0);
        // λ = 1: (2a + 2I) x = −b gives x₂ = 1/6.
        assert!((x[1] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn trust_region_linear_model_binds() {
        let x = trust_region_min(&SymmetricMatrix::zeros(2), &Vector::from_vec(vec![0.0, -3.0]), 1.0)
            .unwrap();
        assert!((x - Vector::from_vec(vec![0.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn trust_region_kkt_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..6);
            let a = random_sym(&mut rng, n).scale(3.0);
            let b = Vector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let radius = rng.random_range(0.1..2.0);
            let x = trust_region_min(&a, &b, radius).unwrap();
            assert!(x.norm() <= radius * (1.0 + 1e-9));
            let q = |y: &Vector| a.quad_form(y) + b.dot(y);
            let qx = q(&x);
            for _ in 0..200 {
                let mut y = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                let nrm = y.norm();
                if nrm > 1.0 {
                    y /= nrm;
                }
                y *= radius;
                assert!(qx <= q(&y) + 1e-6);
            }
        }
    }
}
