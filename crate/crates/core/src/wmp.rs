//! The weighted Moore-Penrose inverse `A†_{MN}` for Hermitian invertible
//! weights `M` (codomain side) and `N` (domain side).
//!
//! Existence is decided by invertibility of the two factor operators
//!
//! ```text
//! R_{A,N}    = A†A + (I - A†A) N
//! L_{A,M^-1} = AA† + M^-1 (I - AA†)
//! ```
//!
//! and, when both are invertible, `A†_{MN} = R_{A,N}^-1 · A† · L_{A,M^-1}^-1`.

use crate::error::{Result, WmpError};
use crate::linalg::{self, operator_norm};
use crate::matrix::Matrix;
use crate::tolerance::ToleranceConfig;
use crate::weight::Weight;

/// `A†` together with the two orthogonal projectors built from it.
#[derive(Debug, Clone)]
pub(crate) struct MpParts {
    pub mp: Matrix,
    /// `A†A`, projector onto `R(A*)`.
    pub p_corange: Matrix,
    /// `AA†`, projector onto `R(A)`.
    pub p_range: Matrix,
}

impl MpParts {
    pub fn new(a: &Matrix, tol: &ToleranceConfig) -> Self {
        let mp = linalg::mp_inverse(a, tol);
        let p_corange = (&mp * a).hermitian_part();
        let p_range = (a * &mp).hermitian_part();
        MpParts {
            mp,
            p_corange,
            p_range,
        }
    }

    fn r_factor(&self, x: &Matrix) -> Matrix {
        let n = self.p_corange.rows();
        &self.p_corange + (Matrix::identity(n) - &self.p_corange) * x
    }

    fn l_factor(&self, y: &Matrix) -> Matrix {
        let m = self.p_range.rows();
        &self.p_range + y * (Matrix::identity(m) - &self.p_range)
    }
}

/// `T^# = N^-1 T* M`, the adjoint of `T` with respect to the indefinite
/// inner products `<x, y>_N` on the domain and `<x, y>_M` on the codomain.
pub fn weighted_adjoint(t: &Matrix, m: &Weight, n: &Weight) -> Result<Matrix> {
    check_weights("weighted_adjoint", t, m, n)?;
    Ok(n.inverse() * t.adjoint() * m.matrix())
}

/// `R_{A,X} = A†A + (I - A†A) X` for square `X` on the domain of `A`.
pub fn r_operator(a: &Matrix, x: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    if !x.is_square() || x.rows() != a.cols() {
        return Err(WmpError::dims(
            "r_operator",
            format!("A is {}x{}, X is {}x{}", a.rows(), a.cols(), x.rows(), x.cols()),
        ));
    }
    Ok(MpParts::new(a, tol).r_factor(x))
}

/// `L_{A,Y} = AA† + Y (I - AA†)` for square `Y` on the codomain of `A`.
pub fn l_operator(a: &Matrix, y: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    if !y.is_square() || y.rows() != a.rows() {
        return Err(WmpError::dims(
            "l_operator",
            format!("A is {}x{}, Y is {}x{}", a.rows(), a.cols(), y.rows(), y.cols()),
        ));
    }
    Ok(MpParts::new(a, tol).l_factor(y))
}

/// Outcome of the existence test for `A†_{MN}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExistenceReport {
    pub r_invertible: bool,
    pub l_invertible: bool,
    pub r_cond: f64,
    pub l_cond: f64,
    pub exists: bool,
}

impl ExistenceReport {
    fn from_conds(r_cond: f64, l_cond: f64, tol: &ToleranceConfig) -> Self {
        let ok = |c: f64| c.is_finite() && c <= tol.inv_cond_max;
        let (r_invertible, l_invertible) = (ok(r_cond), ok(l_cond));
        ExistenceReport {
            r_invertible,
            l_invertible,
            r_cond,
            l_cond,
            exists: r_invertible && l_invertible,
        }
    }

    /// Name of the singular factor(s), if any.
    pub fn failing_factor(&self) -> Option<&'static str> {
        match (self.r_invertible, self.l_invertible) {
            (true, true) => None,
            (false, true) => Some("R_{A,N}"),
            (true, false) => Some("L_{A,M^-1}"),
            (false, false) => Some("R_{A,N} and L_{A,M^-1}"),
        }
    }

    pub(crate) fn into_error(self) -> WmpError {
        WmpError::NonExistent {
            factor: self.failing_factor().unwrap_or("none"),
            r_cond: self.r_cond,
            l_cond: self.l_cond,
        }
    }
}

/// Decides existence of `A†_{MN}` from the invertibility of `R_{A,N}` and
/// `L_{A,M^-1}`.
pub fn wmp_exists(a: &Matrix, m: &Weight, n: &Weight, tol: &ToleranceConfig) -> Result<ExistenceReport> {
    check_weights("wmp_exists", a, m, n)?;
    let parts = MpParts::new(a, tol);
    let r = parts.r_factor(n.matrix());
    let l = parts.l_factor(m.inverse());
    Ok(ExistenceReport::from_conds(
        linalg::condition_number(&r)?,
        linalg::condition_number(&l)?,
        tol,
    ))
}

/// Norms of the four defining-equation defects of a candidate `X`:
/// `AXA = A`, `XAX = X`, `(MAX)* = MAX`, `(NXA)* = NXA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenroseResiduals {
    pub axa: f64,
    pub xax: f64,
    pub max_sym: f64,
    pub nxa_sym: f64,
}

impl PenroseResiduals {
    pub fn as_array(&self) -> [f64; 4] {
        [self.axa, self.xax, self.max_sym, self.nxa_sym]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    pub fn all_below(&self, threshold: f64) -> bool {
        self.max() <= threshold
    }
}

pub fn verify_weighted_penrose(
    a: &Matrix,
    m: &Weight,
    n: &Weight,
    x: &Matrix,
) -> Result<PenroseResiduals> {
    check_weights("verify_weighted_penrose", a, m, n)?;
    if x.shape() != (a.cols(), a.rows()) {
        return Err(WmpError::dims(
            "verify_weighted_penrose",
            format!("A is {}x{}, X is {}x{}", a.rows(), a.cols(), x.rows(), x.cols()),
        ));
    }
    let ax = a * x;
    let xa = x * a;
    let max = m.matrix() * &ax;
    let nxa = n.matrix() * &xa;
    Ok(PenroseResiduals {
        axa: operator_norm(&(&ax * a - a)),
        xax: operator_norm(&(&xa * x - x)),
        max_sym: operator_norm(&(&max - max.adjoint())),
        nxa_sym: operator_norm(&(&nxa - nxa.adjoint())),
    })
}

/// `A†_{MN}` with the factors it was assembled from.
#[derive(Debug, Clone)]
pub struct WmpResult {
    /// `A†_{MN}`.
    pub inverse: Matrix,
    /// `A†`.
    pub mp: Matrix,
    /// `R_{A,N}`.
    pub r_factor: Matrix,
    /// `L_{A,M^-1}`.
    pub l_factor: Matrix,
    pub r_cond: f64,
    pub l_cond: f64,
    pub penrose: PenroseResiduals,
    pub existence: ExistenceReport,
}

impl WmpResult {
    /// All four residuals within `verify_atol`.
    pub fn certified(&self, tol: &ToleranceConfig) -> bool {
        self.penrose.all_below(tol.verify_atol)
    }

    /// `||R^-1|| · ||A†|| · ||L^-1||`, the submultiplicative bound on
    /// `||A†_{MN}||`.
    pub fn norm_bound(&self) -> f64 {
        let smin = |x: &Matrix| linalg::singular_values(x).last().copied().unwrap_or(1.0);
        operator_norm(&self.mp) / (smin(&self.r_factor) * smin(&self.l_factor))
    }
}

/// Computes `A†_{MN} = R_{A,N}^-1 · A† · L_{A,M^-1}^-1`.
///
/// Fails with [`WmpError::NonExistent`] naming the singular factor when
/// either condition number exceeds `inv_cond_max`.
pub fn wmp_inverse(a: &Matrix, m: &Weight, n: &Weight, tol: &ToleranceConfig) -> Result<WmpResult> {
    check_weights("wmp_inverse", a, m, n)?;
    let parts = MpParts::new(a, tol);
    let r = parts.r_factor(n.matrix());
    let l = parts.l_factor(m.inverse());
    let existence =
        ExistenceReport::from_conds(linalg::condition_number(&r)?, linalg::condition_number(&l)?, tol);
    if !existence.exists {
        return Err(existence.into_error());
    }
    // X = R^-1 (A† L^-1), both factors applied by solves.
    let mp_l = linalg::solve_right(&parts.mp, &l)?;
    let mut inverse = linalg::solve(&r, &mp_l)?;
    let mut penrose = verify_weighted_penrose(a, m, n, &inverse)?;
    // One Newton-Schulz step X(2I - AX) keeps R(X) and N(X), hence the
    // target, and removes most of the rounding carried in from A†.
    let refined = &inverse * (Matrix::identity(a.rows()).scale(2.0) - a * &inverse);
    let refined_penrose = verify_weighted_penrose(a, m, n, &refined)?;
    if refined_penrose.max() < penrose.max() {
        inverse = refined;
        penrose = refined_penrose;
    }
    Ok(WmpResult {
        inverse,
        mp: parts.mp,
        r_cond: existence.r_cond,
        l_cond: existence.l_cond,
        r_factor: r,
        l_factor: l,
        penrose,
        existence,
    })
}

/// `N^{-1/2} (M^{1/2} A N^{-1/2})† M^{1/2}`, valid for positive-definite
/// weights only. Serves as an independent check on [`wmp_inverse`].
pub fn wmp_inverse_positive(a: &Matrix, m: &Weight, n: &Weight, tol: &ToleranceConfig) -> Result<Matrix> {
    check_weights("wmp_inverse_positive", a, m, n)?;
    let m_half = m.sqrt()?;
    let n_inv_half = n.inv_sqrt()?;
    let inner = &m_half * a * &n_inv_half;
    Ok(&n_inv_half * linalg::mp_inverse(&inner, tol) * &m_half)
}

pub(crate) fn check_weights(op: &'static str, a: &Matrix, m: &Weight, n: &Weight) -> Result<()> {
    if m.dim() != a.rows() || n.dim() != a.cols() {
        return Err(WmpError::dims(
            op,
            format!(
                "A is {}x{}, M is {}x{}, N is {}x{} (M acts on the codomain, N on the domain)",
                a.rows(),
                a.cols(),
                m.dim(),
                m.dim(),
                n.dim(),
                n.dim()
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_weights_give_plain_adjoint() {
        let t = Matrix::new(2, 3, (0..6).map(|k| c64(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let adj = weighted_adjoint(&t, &Weight::identity(2), &Weight::identity(3)).unwrap();
        assert_eq!(adj, t.adjoint());
        assert!(weighted_adjoint(&t, &Weight::identity(3), &Weight::identity(3)).is_err());
    }

    #[test]
    fn identity_operator_is_self_adjoint_for_equal_weights() {
        let w = Weight::new(Matrix::from_real(2, 2, &[2.0, 1.0, 1.0, -1.0]).unwrap(), &tol()).unwrap();
        let adj = weighted_adjoint(&Matrix::identity(2), &w, &w).unwrap();
        assert!(operator_norm(&(adj - Matrix::identity(2))) < 1e-14);
    }

    #[test]
    fn r_with_identity_is_identity() {
        let a = Matrix::from_real(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let r = r_operator(&a, &Matrix::identity(3), &tol()).unwrap();
        assert!(operator_norm(&(r - Matrix::identity(3))) < 1e-14);
        let l = l_operator(&a, &Matrix::identity(2), &tol()).unwrap();
        assert!(operator_norm(&(l - Matrix::identity(2))) < 1e-14);
        assert!(r_operator(&a, &Matrix::identity(2), &tol()).is_err());
        assert!(l_operator(&a, &Matrix::identity(3), &tol()).is_err());
    }

    #[test]
    fn identity_weights_always_exist() {
        let a = Matrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        let rep = wmp_exists(&a, &Weight::identity(2), &Weight::identity(2), &tol()).unwrap();
        assert!(rep.exists);
        assert!((rep.r_cond - 1.0).abs() < 1e-12 && (rep.l_cond - 1.0).abs() < 1e-12);
    }

    #[test]
    fn swap_weight_makes_r_singular() {
        // A = e1 e1^T, N = [[0,1],[1,0]]: A†A = diag(1,0) and
        // (I - A†A) N = [[0,0],[1,0]], so R = [[1,0],[1,0]], singular.
        let a = Matrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let n = Weight::new(Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(), &tol()).unwrap();
        let r = r_operator(&a, n.matrix(), &tol()).unwrap();
        let expected = Matrix::from_real(2, 2, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(operator_norm(&(r - expected)) < 1e-15);
        let rep = wmp_exists(&a, &Weight::identity(2), &n, &tol()).unwrap();
        assert!(!rep.exists && !rep.r_invertible && rep.l_invertible);
        assert_eq!(rep.failing_factor(), Some("R_{A,N}"));
        let err = wmp_inverse(&a, &Weight::identity(2), &n, &tol()).unwrap_err();
        assert!(matches!(err, WmpError::NonExistent { factor: "R_{A,N}", .. }));
    }

    #[test]
    fn zero_candidate_first_residual_is_norm_of_a() {
        let a = Matrix::from_real(2, 2, &[3.0, 0.0, 0.0, 1.0]).unwrap();
        let res = verify_weighted_penrose(&a, &Weight::identity(2), &Weight::identity(2), &Matrix::zeros(2, 2))
            .unwrap();
        assert!((res.axa - 3.0).abs() < 1e-14);
        assert_eq!(res.xax, 0.0);
    }

    #[test]
    fn identity_weights_reduce_to_pinv() {
        let a = Matrix::from_real(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let out = wmp_inverse(&a, &Weight::identity(3), &Weight::identity(2), &tol()).unwrap();
        let pinv = linalg::mp_inverse(&a, &tol());
        assert!(operator_norm(&(&out.inverse - &pinv)) < 1e-13);
        assert!(out.certified(&tol()));
    }

    #[test]
    fn penrose_shape_mismatch() {
        let a = Matrix::zeros(2, 3);
        let x = Matrix::zeros(2, 3);
        assert!(verify_weighted_penrose(&a, &Weight::identity(2), &Weight::identity(3), &x).is_err());
    }
}
