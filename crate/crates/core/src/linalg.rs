//! Dense complex linear algebra: SVD-based pseudoinverse, projectors,
//! norms and the rank/invertibility decisions the rest of the crate relies on.
//!
//! Ranks are decided by truncating singular values at
//! `ToleranceConfig::rank_cutoff`. Invertibility means a finite condition
//! number no larger than `inv_cond_max`.

use nalgebra::DMatrix;

use crate::error::{Result, WmpError};
use crate::matrix::{c64, Matrix, C64};
use crate::schedule;
use crate::tolerance::ToleranceConfig;

/// Thin singular value decomposition `A = U diag(sigma) Vh`.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    pub u: Matrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    pub vh: Matrix,
    pub numerical_rank: usize,
}

impl SvdFactorization {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// `V_r diag(1/sigma_r) U_r*` using the leading `rank` triplets.
    pub fn pseudo_inverse_with_rank(&self, rank: usize) -> Matrix {
        let (m, n) = (self.u.rows(), self.vh.cols());
        let rank = rank.min(self.sigma.len());
        let mut out = DMatrix::<C64>::zeros(n, m);
        let u = self.u.as_dmatrix();
        let vh = self.vh.as_dmatrix();
        for k in 0..rank {
            let inv = 1.0 / self.sigma[k];
            // out += v_k * inv * u_k^*
            for j in 0..m {
                let uc = u[(j, k)].conj() * inv;
                if uc == c64(0.0, 0.0) {
                    continue;
                }
                for i in 0..n {
                    out[(i, j)] += vh[(k, i)].conj() * uc;
                }
            }
        }
        Matrix::wrap(out)
    }

    pub fn pseudo_inverse(&self) -> Matrix {
        self.pseudo_inverse_with_rank(self.numerical_rank)
    }

    /// `U diag(sigma) Vh`.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.as_dmatrix().clone();
        for (k, s) in self.sigma.iter().enumerate() {
            us.column_mut(k).scale_mut(*s);
        }
        Matrix::wrap(us * self.vh.as_dmatrix())
    }
}

fn to_faer(a: &Matrix) -> faer::Mat<C64> {
    let d = a.as_dmatrix();
    faer::Mat::from_fn(d.nrows(), d.ncols(), |i, j| d[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, C64>) -> Matrix {
    Matrix::wrap(DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]))
}

/// Thin SVD with numerical rank decided by `tol`.
pub fn svd(a: &Matrix, tol: &ToleranceConfig) -> SvdFactorization {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return SvdFactorization {
            u: Matrix::zeros(m, 0),
            sigma: Vec::new(),
            vh: Matrix::zeros(0, n),
            numerical_rank: 0,
        };
    }
    let dec = to_faer(a).thin_svd().expect("SVD of a finite matrix converges");
    let sigma: Vec<f64> = (0..m.min(n)).map(|k| dec.S()[k].re).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(m, n, smax);
    let numerical_rank = sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    SvdFactorization {
        u: from_faer(dec.U()),
        sigma,
        vh: from_faer(dec.V()).adjoint(),
        numerical_rank,
    }
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    to_faer(a)
        .singular_values()
        .expect("SVD of a finite matrix converges")
}

pub fn numerical_rank(a: &Matrix, tol: &ToleranceConfig) -> usize {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(a.rows(), a.cols(), smax);
    s.iter().filter(|&&x| x > cutoff && x > 0.0).count()
}

/// Moore-Penrose inverse by truncated SVD. The zero matrix maps to the zero
/// matrix of transposed shape.
pub fn mp_inverse(a: &Matrix, tol: &ToleranceConfig) -> Matrix {
    svd(a, tol).pseudo_inverse()
}

/// Moore-Penrose inverse with the rank fixed by the caller, for matrices
/// whose rank is known from structure rather than from their own spectrum.
pub fn mp_inverse_with_rank(a: &Matrix, rank: usize, tol: &ToleranceConfig) -> Matrix {
    svd(a, tol).pseudo_inverse_with_rank(rank)
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// `sigma_max / sigma_min` for a square matrix; infinite when singular.
pub fn condition_number(a: &Matrix) -> Result<f64> {
    require_square(a, "condition_number")?;
    let s = singular_values(a);
    Ok(cond_from_sigma(&s))
}

pub(crate) fn cond_from_sigma(s: &[f64]) -> f64 {
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

pub fn is_invertible(a: &Matrix, tol: &ToleranceConfig) -> Result<bool> {
    let cond = condition_number(a)?;
    Ok(cond.is_finite() && cond <= tol.inv_cond_max)
}

/// `||A - A*||` in the spectral norm.
pub fn hermitian_defect(a: &Matrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    operator_norm(&(a - a.adjoint()))
}

/// Hermitian to `verify_atol + verify_rtol * ||A||`. Non-square matrices
/// are never Hermitian.
pub fn is_hermitian(a: &Matrix, tol: &ToleranceConfig) -> bool {
    a.is_square() && hermitian_defect(a) <= tol.verify_threshold(operator_norm(a))
}

/// Hermitian, with smallest eigenvalue above `||A|| / inv_cond_max`.
pub fn is_positive_definite(a: &Matrix, tol: &ToleranceConfig) -> Result<bool> {
    require_square(a, "is_positive_definite")?;
    if !is_hermitian(a, tol) {
        return Ok(false);
    }
    if a.rows() == 0 {
        return Ok(true);
    }
    let (vals, _) = hermitian_eigen(a);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(vals[0] > scale / tol.inv_cond_max)
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
/// Columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn hermitian_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let h = a.hermitian_part();
    let eig = to_faer(&h)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigendecomposition of a finite matrix converges");
    let vals = (0..n).map(|k| eig.S()[k].re).collect();
    (vals, from_faer(eig.U()))
}

/// `Q f(Lambda) Q*` for the Hermitian part of `a`.
pub fn hermitian_function(a: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let (vals, q) = hermitian_eigen(a);
    from_eigen(&vals, &q, f)
}

pub(crate) fn from_eigen(vals: &[f64], q: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let n = q.rows();
    let mut qf = q.as_dmatrix().clone();
    for (k, &v) in vals.iter().enumerate() {
        qf.column_mut(k).scale_mut(f(v));
    }
    let out = qf * q.as_dmatrix().adjoint();
    debug_assert_eq!(out.nrows(), n);
    // Exact Hermitian symmetry for downstream consumers.
    Matrix::wrap(out).hermitian_part()
}

/// Smallest eigenvalue of the Hermitian part of `a`.
pub fn min_eigenvalue(a: &Matrix) -> f64 {
    hermitian_eigen(a).0.first().copied().unwrap_or(f64::INFINITY)
}

/// Solves `A X = B` for square `A` through Householder QR.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    require_square(a, "solve")?;
    if a.rows() != b.rows() {
        return Err(WmpError::dims(
            "solve",
            format!("A is {}x{}, B has {} rows", a.rows(), a.cols(), b.rows()),
        ));
    }
    if a.rows() == 0 {
        return Ok(Matrix::zeros(0, b.cols()));
    }
    let qr = a.as_dmatrix().clone().qr();
    match qr.solve(b.as_dmatrix()) {
        Some(x) if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => Ok(Matrix::wrap(x)),
        _ => Err(WmpError::NotInvertible {
            cond: condition_number(a).unwrap_or(f64::INFINITY),
        }),
    }
}

/// Solves `X A = B` for square `A`.
pub fn solve_right(b: &Matrix, a: &Matrix) -> Result<Matrix> {
    Ok(solve(&a.adjoint(), &b.adjoint())?.adjoint())
}

/// Explicit inverse, for the few places where the inverse matrix itself is
/// the requested output.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    solve(a, &Matrix::identity(a.rows()))
}

/// Orthogonal projector `A A^dagger` onto the range of `A`.
pub fn projector_range(a: &Matrix, tol: &ToleranceConfig) -> Matrix {
    let dec = svd(a, tol);
    let ur = dec.u.block(0, 0, a.rows(), dec.numerical_rank);
    (&ur * ur.adjoint()).hermitian_part()
}

/// Orthogonal projector `A^dagger A` onto the range of `A*`.
pub fn projector_corange(a: &Matrix, tol: &ToleranceConfig) -> Matrix {
    let dec = svd(a, tol);
    let vr = dec.vh.block(0, 0, dec.numerical_rank, a.cols());
    (vr.adjoint() * &vr).hermitian_part()
}

/// Projector onto `N(A) ∩ N(B)`, computed as `I - S^dagger S` with `S`
/// the stack of `A` over `B`.
pub fn projector_nullspace_pair(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(WmpError::dims(
            "projector_nullspace_pair",
            format!("A has {} columns, B has {}", a.cols(), b.cols()),
        ));
    }
    let s = Matrix::vstack(a, b)?;
    Ok(Matrix::identity(a.cols()) - projector_corange(&s, tol))
}

/// Orthonormal bases `(range, complement)` for an orthogonal projector `p`.
pub fn projector_bases(p: &Matrix) -> (Matrix, Matrix) {
    let n = p.rows();
    let (vals, q) = hermitian_eigen(p);
    let split = vals.iter().filter(|&&v| v < 0.5).count();
    let complement = q.block(0, 0, n, split);
    let range = q.block(0, split, n, n - split);
    (range, complement)
}

/// Result of running the regularized inverse `(T*T + tI)^{-1} T*` along a
/// schedule of decreasing `t`.
#[derive(Debug, Clone)]
pub struct RegularizedLimit {
    pub steps: Vec<RegularizedStep>,
    /// The SVD pseudoinverse the iterates approach.
    pub target: Matrix,
}

#[derive(Debug, Clone)]
pub struct RegularizedStep {
    pub t: f64,
    pub iterate: Matrix,
    pub error: f64,
}

impl RegularizedLimit {
    pub fn final_error(&self) -> f64 {
        self.steps.last().map_or(f64::INFINITY, |s| s.error)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.error).collect()
    }

    /// Whether the error column is nonincreasing over the last `k` steps,
    /// ignoring fluctuations below `floor`.
    pub fn tail_nonincreasing(&self, k: usize, floor: f64) -> bool {
        let errs = self.errors();
        let start = errs.len().saturating_sub(k);
        schedule::nonincreasing_above_floor(&errs[start..], floor)
    }
}

/// Evaluates `(T*T + tI)^{-1} T*` for every `t` in a strictly decreasing
/// positive schedule and measures the distance to `T^dagger`.
pub fn regularized_pinv_limit(
    t_mat: &Matrix,
    schedule: &[f64],
    tol: &ToleranceConfig,
) -> Result<RegularizedLimit> {
    schedule::validate_decreasing(schedule)?;
    let target = mp_inverse(t_mat, tol);
    let th = t_mat.adjoint();
    let gram = &th * t_mat;
    let n = t_mat.cols();
    let steps = schedule
        .iter()
        .map(|&t| {
            let shifted = &gram + Matrix::identity(n).scale(t);
            let iterate = solve(&shifted, &th)?;
            let error = operator_norm(&(&iterate - &target));
            Ok(RegularizedStep { t, iterate, error })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularizedLimit { steps, target })
}

pub(crate) fn require_square(a: &Matrix, op: &'static str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(WmpError::dims(op, format!("expected a square matrix, got {}x{}", a.rows(), a.cols())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn close(a: &Matrix, b: &Matrix, eps: f64) -> bool {
        a.shape() == b.shape() && operator_norm(&(a - b)) <= eps
    }

    #[test]
    fn identity_pinv() {
        let i3 = Matrix::identity(3);
        assert!(close(&mp_inverse(&i3, &tol()), &i3, 1e-15));
    }

    #[test]
    fn zero_pinv_has_transposed_shape() {
        let z = Matrix::zeros(2, 5);
        let p = mp_inverse(&z, &tol());
        assert_eq!(p.shape(), (5, 2));
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn empty_matrices() {
        let e = Matrix::zeros(0, 3);
        assert_eq!(mp_inverse(&e, &tol()).shape(), (3, 0));
        assert_eq!(operator_norm(&e), 0.0);
        assert_eq!(numerical_rank(&e, &tol()), 0);
    }

    #[test]
    fn svd_reconstructs_and_is_sorted() {
        let a = Matrix::new(
            3,
            2,
            vec![
                c64(1.0, 1.0),
                c64(2.0, 0.0),
                c64(0.0, -1.0),
                c64(3.0, 0.5),
                c64(-1.0, 0.0),
                c64(0.5, 2.0),
            ],
        )
        .unwrap();
        let d = svd(&a, &tol());
        assert!(d.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(close(&d.reconstruct(), &a, 1e-13));
        assert_eq!(d.numerical_rank, 2);
        let uhu = d.u.adjoint() * &d.u;
        assert!(close(&uhu, &Matrix::identity(2), 1e-13));
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let d = Matrix::from_diagonal(&[3.0, 1.0]).unwrap();
        assert!((operator_norm(&d) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn near_singular_is_not_invertible() {
        let d = Matrix::from_diagonal(&[1.0, 1e-15]).unwrap();
        assert!(!is_invertible(&d, &tol()).unwrap());
        let d = Matrix::from_diagonal(&[1.0, 1e-6]).unwrap();
        assert!(is_invertible(&d, &tol()).unwrap());
        assert!(is_invertible(&Matrix::zeros(2, 3), &tol()).is_err());
    }

    #[test]
    fn definiteness_predicates() {
        let t = tol();
        let pd = Matrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(is_positive_definite(&pd, &t).unwrap());
        let indef = Matrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(!is_positive_definite(&indef, &t).unwrap());
        let nonherm = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(!is_hermitian(&nonherm, &t));
        assert!(!is_positive_definite(&nonherm, &t).unwrap());
        assert!(is_positive_definite(&Matrix::zeros(1, 2), &t).is_err());
        assert!(!is_hermitian(&Matrix::zeros(1, 2), &t));
    }

    #[test]
    fn pair_projector_examples() {
        let t = tol();
        let p = projector_nullspace_pair(&Matrix::identity(2), &Matrix::zeros(2, 2), &t).unwrap();
        assert!(close(&p, &Matrix::zeros(2, 2), 1e-15));
        let p = projector_nullspace_pair(&Matrix::zeros(2, 2), &Matrix::zeros(2, 2), &t).unwrap();
        assert!(close(&p, &Matrix::identity(2), 1e-15));
        // N(e1^T) ∩ N(e2^T) in C^3 is span(e3).
        let e1 = Matrix::from_real(1, 3, &[1.0, 0.0, 0.0]).unwrap();
        let e2 = Matrix::from_real(1, 3, &[0.0, 1.0, 0.0]).unwrap();
        let p = projector_nullspace_pair(&e1, &e2, &t).unwrap();
        let e3e3 = Matrix::from_diagonal(&[0.0, 0.0, 1.0]).unwrap();
        assert!(close(&p, &e3e3, 1e-15));
        assert!(projector_nullspace_pair(&e1, &Matrix::zeros(1, 2), &t).is_err());
    }

    #[test]
    fn projector_bases_split() {
        let p = Matrix::from_diagonal(&[1.0, 0.0, 1.0]).unwrap();
        let (r, c) = projector_bases(&p);
        assert_eq!(r.cols(), 2);
        assert_eq!(c.cols(), 1);
        assert!(close(&(&r * r.adjoint()), &p, 1e-14));
    }

    #[test]
    fn regularized_identity_step() {
        let out = regularized_pinv_limit(&Matrix::identity(2), &[1.0], &tol()).unwrap();
        assert!(close(&out.steps[0].iterate, &Matrix::identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn regularized_zero_operator() {
        let out = regularized_pinv_limit(&Matrix::zeros(3, 3), &[1.0, 0.1, 0.01], &tol()).unwrap();
        assert!(out.steps.iter().all(|s| s.iterate.max_abs() == 0.0));
    }

    #[test]
    fn regularized_rejects_bad_schedule() {
        let i = Matrix::identity(2);
        assert!(regularized_pinv_limit(&i, &[], &tol()).is_err());
        assert!(regularized_pinv_limit(&i, &[0.1, -0.1], &tol()).is_err());
        assert!(regularized_pinv_limit(&i, &[0.1, 0.2], &tol()).is_err());
    }

    #[test]
    fn solve_and_inverse() {
        let a = Matrix::from_real(2, 2, &[4.0, 1.0, 2.0, 3.0]).unwrap();
        let inv = inverse(&a).unwrap();
        assert!(close(&(&a * &inv), &Matrix::identity(2), 1e-14));
        let b = Matrix::from_real(2, 1, &[1.0, 2.0]).unwrap();
        let x = solve_right(&b.adjoint(), &a).unwrap();
        assert!(close(&(&x * &a), &b.adjoint(), 1e-14));
        assert!(solve(&Matrix::zeros(2, 2), &b).is_err());
    }

    #[test]
    fn hermitian_function_square_root() {
        let a = Matrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let r = hermitian_function(&a, f64::sqrt);
        assert!(close(&(&r * &r), &a, 1e-14));
    }
}
