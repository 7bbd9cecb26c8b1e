//! Limit formulas for the ordinary weighted inverse.
//!
//! With positive-definite `V`, `W` and `C_t = A*VA + t B*WB`,
//!
//! ```text
//! lim_{t->0+} C_t† A*V = A†_{VU}                     for any U in Omega_{A,B,W}
//! lim_{λ->∞} (λA + B)† B = [(I - A†A) B (I - A†A)]† B  for PSD A, B
//! ```
//!
//! plus the closed forms available when `(R(A*), R(B*))` is a separated
//! pair, and the splitting `B = B1 + B2` that reduces the general case to
//! the separated one.

use crate::error::{Result, WmpError};
use crate::linalg::{self, operator_norm};
use crate::matrix::Matrix;
use crate::schedule;
use crate::tolerance::ToleranceConfig;
use crate::weight::Weight;
use crate::wmp::wmp_inverse;

/// Separated-pair margin: `||PQ||` must not exceed `1 - SEPARATION_MARGIN`.
pub const SEPARATION_MARGIN: f64 = 1e-6;

/// Convergence threshold `1e-8 (1 + ||target||)` for limit traces.
pub fn limit_atol(target: &Matrix) -> f64 {
    1e-8 * (1.0 + operator_norm(target))
}

fn require_pd(w: &Weight, which: &'static str) -> Result<()> {
    if w.is_positive_definite() {
        Ok(())
    } else {
        Err(WmpError::NotPositiveDefinite {
            which,
            min_eig: w.eigenvalues()[0],
        })
    }
}

fn check_cols(op: &'static str, a: &Matrix, b: &Matrix) -> Result<()> {
    if a.cols() == b.cols() {
        Ok(())
    } else {
        Err(WmpError::dims(
            op,
            format!("A has {} columns, B has {}", a.cols(), b.cols()),
        ))
    }
}

fn check_pair_weights(op: &'static str, a: &Matrix, b: &Matrix, v: &Weight, w: &Weight) -> Result<()> {
    check_cols(op, a, b)?;
    if v.dim() != a.rows() || w.dim() != b.rows() {
        return Err(WmpError::dims(
            op,
            format!(
                "V is {0}x{0} for A with {1} rows, W is {2}x{2} for B with {3} rows",
                v.dim(),
                a.rows(),
                w.dim(),
                b.rows()
            ),
        ));
    }
    require_pd(v, "V")?;
    require_pd(w, "W")
}

/// A member `U = A*XA + B*WB + Y P_null` of `Omega_{A,B,W}`.
#[derive(Debug, Clone)]
pub struct OmegaWeight {
    pub u: Weight,
    pub x: Matrix,
    /// `Y` compressed to the common null space, `P_null Y P_null`.
    pub y: Matrix,
    /// Projector onto `N(A) ∩ N(B)`.
    pub p_null: Matrix,
    /// Smallest eigenvalue of `A*XA + B*WB` on `R(A*A + B*B)`.
    pub range_min_eig: f64,
}

/// Builds and validates a member of `Omega_{A,B,W}`. `X` defaults to the
/// identity (callers usually pass `V`) and `Y` to the identity on the
/// common null space.
pub fn omega_weight(
    a: &Matrix,
    b: &Matrix,
    w: &Weight,
    x: Option<&Matrix>,
    y: Option<&Matrix>,
    tol: &ToleranceConfig,
) -> Result<OmegaWeight> {
    check_cols("omega_weight", a, b)?;
    if w.dim() != b.rows() {
        return Err(WmpError::dims("omega_weight", "W must act on the codomain of B"));
    }
    require_pd(w, "W")?;
    let (k, h) = a.shape();
    let x = x.cloned().unwrap_or_else(|| Matrix::identity(k));
    if x.shape() != (k, k) {
        return Err(WmpError::dims("omega_weight", "X must act on the codomain of A"));
    }
    let defect = linalg::hermitian_defect(&x);
    if defect > tol.verify_threshold(operator_norm(&x)) {
        return Err(WmpError::NotHermitian { asymmetry: defect });
    }
    let x = x.hermitian_part();
    let p_null = linalg::projector_nullspace_pair(a, b, tol)?;
    let (null_basis, range_basis) = linalg::projector_bases(&p_null);

    let core = (a.adjoint() * &x * a + b.adjoint() * w.matrix() * b).hermitian_part();
    let restricted = (range_basis.adjoint() * &core * &range_basis).hermitian_part();
    let range_min_eig = if restricted.rows() == 0 {
        f64::INFINITY
    } else {
        linalg::min_eigenvalue(&restricted)
    };
    let scale = operator_norm(&restricted);
    if restricted.rows() > 0 && range_min_eig <= scale / tol.inv_cond_max {
        return Err(WmpError::NotPositiveOnRange {
            min_eig: range_min_eig,
        });
    }

    let y = match y {
        Some(y) if y.shape() != (h, h) => {
            return Err(WmpError::dims("omega_weight", "Y must act on the domain of A"))
        }
        Some(y) => (&p_null * y * &p_null).hermitian_part(),
        None => p_null.clone(),
    };
    if null_basis.cols() > 0 {
        let on_null = (null_basis.adjoint() * &y * &null_basis).hermitian_part();
        let min_eig = linalg::min_eigenvalue(&on_null);
        if min_eig <= operator_norm(&on_null) / tol.inv_cond_max {
            return Err(WmpError::NotPositiveOnNullspace { which: "Y", min_eig });
        }
    }
    let u = Weight::new(core + &y, tol)?;
    require_pd(&u, "U")?;
    Ok(OmegaWeight {
        u,
        x,
        y,
        p_null,
        range_min_eig,
    })
}

#[derive(Debug, Clone)]
pub struct LimitRow {
    /// `t` for the `t -> 0` formulas, `λ` for `λ -> ∞`.
    pub param: f64,
    pub iterate: Matrix,
    pub error: f64,
    /// Numerical rank the iterate's matrix showed on its own; the iterate
    /// itself always uses the pinned rank.
    pub observed_rank: usize,
}

/// Iterates of a limit formula along a schedule, with their distance to
/// the predicted limit.
#[derive(Debug, Clone)]
pub struct LimitTrace {
    pub rows: Vec<LimitRow>,
    pub target: Matrix,
    /// `1e-8 (1 + ||target||)`.
    pub limit_atol: f64,
    pub converged: bool,
    /// Rank imposed on every pseudoinverse along the trace.
    pub pinned_rank: usize,
}

impl LimitTrace {
    fn new(rows: Vec<LimitRow>, target: Matrix, pinned_rank: usize) -> Self {
        let limit_atol = limit_atol(&target);
        let converged = rows.last().is_some_and(|r| r.error <= limit_atol);
        LimitTrace {
            rows,
            target,
            limit_atol,
            converged,
            pinned_rank,
        }
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.error)
    }

    /// True if some row's own numerical rank differed from the pinned rank.
    pub fn rank_changed(&self) -> bool {
        self.rows.iter().any(|r| r.observed_rank != self.pinned_rank)
    }

    /// Whether the error column is nonincreasing over the last `k` rows,
    /// ignoring changes below `floor`.
    pub fn tail_nonincreasing(&self, k: usize, floor: f64) -> bool {
        let errs = self.errors();
        let start = errs.len().saturating_sub(k);
        schedule::nonincreasing_above_floor(&errs[start..], floor)
    }

    /// The floor `verify_atol (1 + ||target||)` used for monotonicity checks.
    pub fn noise_floor(&self, tol: &ToleranceConfig) -> f64 {
        tol.verify_atol * (1.0 + operator_norm(&self.target))
    }
}

fn stacked_rank(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(linalg::numerical_rank(&Matrix::vstack(a, b)?, tol))
}

/// First `k` left singular vectors of `m`.
fn leading_left(m: &Matrix, k: usize, tol: &ToleranceConfig) -> Matrix {
    let dec = linalg::svd(m, tol);
    dec.u.block(0, 0, m.rows(), k.min(dec.sigma.len()))
}

/// First `k` right singular vectors of `m`, as columns.
fn leading_right(m: &Matrix, k: usize, tol: &ToleranceConfig) -> Matrix {
    let dec = linalg::svd(m, tol);
    dec.vh.block(0, 0, k.min(dec.sigma.len()), m.cols()).adjoint()
}

/// Orthonormal basis of the part of `R(basis)` orthogonal to the
/// orthonormal columns `q1`, of dimension `k`.
fn complement_basis(q1: &Matrix, basis: &Matrix, k: usize, tol: &ToleranceConfig) -> Matrix {
    let residual = basis - q1 * (q1.adjoint() * basis);
    leading_left(&residual, k, tol)
}

/// `(A*VA + tB*WB)† A*V` in the basis `[Q1 Q2]` of `R(A*) + R(B*)`, where
/// `Q1` spans `R(A*)` and `Q2` the rest. Since `AQ2 = 0` the second block
/// row eliminates exactly, leaving
///
/// ```text
/// X(t) = (Q1 - Q2 C) [V^{1/2} A Q1; sqrt(t) E]† [V^{1/2}; 0]
/// C = (W^{1/2} B Q2)† W^{1/2} B Q1,   E = W^{1/2} B Q1 - W^{1/2} B Q2 C
/// ```
///
/// in which `t` only scales a block whose conditioning does not degrade as
/// `t -> 0`.
struct GramSplit {
    basis: Matrix,
    top: Matrix,
    lower: Matrix,
    v_half: Matrix,
    v_half_a: Matrix,
    w_half_b: Matrix,
    rank_a: usize,
    rank: usize,
}

impl GramSplit {
    fn new(a: &Matrix, b: &Matrix, v: &Weight, w: &Weight, tol: &ToleranceConfig) -> Result<Self> {
        let rank_a = linalg::numerical_rank(a, tol);
        let stacked = Matrix::vstack(a, b)?;
        let rank = linalg::numerical_rank(&stacked, tol).max(rank_a);
        let q1 = leading_right(a, rank_a, tol);
        let h0 = leading_right(&stacked, rank, tol);
        let q2 = complement_basis(&q1, &h0, rank - rank_a, tol);
        let v_half = v.sqrt()?;
        let w_half_b = w.sqrt()? * b;
        let wb1 = &w_half_b * &q1;
        let wb2 = &w_half_b * &q2;
        let c = linalg::mp_inverse_with_rank(&wb2, q2.cols(), tol) * &wb1;
        let lower = &wb1 - &wb2 * &c;
        let v_half_a = &v_half * a;
        Ok(GramSplit {
            basis: &q1 - &q2 * &c,
            top: &v_half_a * &q1,
            lower,
            v_half,
            v_half_a,
            w_half_b,
            rank_a,
            rank,
        })
    }

    /// The iterate at `t` and the numerical rank `[V^{1/2}A; sqrt(t) W^{1/2}B]`
    /// shows on its own.
    fn iterate(&self, t: f64, tol: &ToleranceConfig) -> Result<(Matrix, usize)> {
        let s = t.sqrt();
        let f = Matrix::vstack(&self.top, &self.lower.scale(s))?;
        let rhs = Matrix::vstack(&self.v_half, &Matrix::zeros(self.lower.rows(), self.v_half.cols()))?;
        let y = linalg::mp_inverse_with_rank(&f, self.rank_a, tol) * rhs;
        let observed = linalg::numerical_rank(&Matrix::vstack(&self.v_half_a, &self.w_half_b.scale(s))?, tol);
        Ok((&self.basis * y, observed))
    }
}

fn t_trace(
    a: &Matrix,
    b: &Matrix,
    v: &Weight,
    w: &Weight,
    schedule: &[f64],
    target: Matrix,
    tol: &ToleranceConfig,
) -> Result<LimitTrace> {
    schedule::validate_decreasing(schedule)?;
    let split = GramSplit::new(a, b, v, w, tol)?;
    let rows = schedule
        .iter()
        .map(|&t| {
            let (iterate, observed_rank) = split.iterate(t, tol)?;
            let error = operator_norm(&(&iterate - &target));
            Ok(LimitRow {
                param: t,
                iterate,
                error,
                observed_rank,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitTrace::new(rows, target, split.rank))
}

/// Runs `C_t† A*V` along a decreasing schedule of `t` toward the target
/// `A†_{VU}`.
pub fn limit_t_to_zero(
    a: &Matrix,
    b: &Matrix,
    v: &Weight,
    w: &Weight,
    u: &OmegaWeight,
    schedule: &[f64],
    tol: &ToleranceConfig,
) -> Result<LimitTrace> {
    check_pair_weights("limit_t_to_zero", a, b, v, w)?;
    if u.u.dim() != a.cols() {
        return Err(WmpError::dims("limit_t_to_zero", "U must act on the domain of A"));
    }
    let target = wmp_inverse(a, v, &u.u, tol)?.inverse;
    t_trace(a, b, v, w, schedule, target, tol)
}

fn require_psd(m: &Matrix, which: &'static str, tol: &ToleranceConfig) -> Result<Matrix> {
    linalg::require_square(m, "limit_lambda_to_inf")?;
    let scale = operator_norm(m);
    let defect = linalg::hermitian_defect(m);
    if defect > tol.verify_threshold(scale) {
        return Err(WmpError::NotHermitian { asymmetry: defect });
    }
    let m = m.hermitian_part();
    let min_eig = if m.rows() == 0 { 0.0 } else { linalg::min_eigenvalue(&m) };
    if min_eig < -tol.verify_threshold(scale) {
        return Err(WmpError::NotPsd { which, min_eig });
    }
    Ok(m)
}

/// Runs `(λA + B)† B` along an increasing schedule of `λ` toward
/// `[(I - A†A) B (I - A†A)]† B`. `A` and `B` must be positive semidefinite.
pub fn limit_lambda_to_inf(a: &Matrix, b: &Matrix, schedule: &[f64], tol: &ToleranceConfig) -> Result<LimitTrace> {
    let a = require_psd(a, "A", tol)?;
    let b = require_psd(b, "B", tol)?;
    if a.shape() != b.shape() {
        return Err(WmpError::dims("limit_lambda_to_inf", "A and B must have the same size"));
    }
    schedule::validate_increasing(schedule)?;
    let n = a.rows();
    let dec_a = linalg::svd(&a, tol);
    let rank_a = dec_a.numerical_rank;
    let rank_sum = linalg::numerical_rank(&(&a + &b), tol);
    let complement = Matrix::identity(n) - (dec_a.pseudo_inverse() * &a).hermitian_part();
    let compressed = (&complement * &b * &complement).hermitian_part();
    // R(λA + B) = R(A) + R(B), so the compression has rank rank(A+B) - rank(A).
    let target = linalg::mp_inverse_with_rank(&compressed, rank_sum - rank_a.min(rank_sum), tol) * &b;
    // In the basis [Q1 Q2] of R(A + B), with Q1 spanning R(A), the matrix
    // λA + B is [[λA11 + B11, B12], [B21, B22]]; eliminating through the
    // Schur complement keeps λ out of every ill-conditioned product.
    let q1 = dec_a.u.block(0, 0, n, rank_a);
    let h0 = leading_left(&(&a + &b), rank_sum, tol);
    let q2 = complement_basis(&q1, &h0, rank_sum - rank_a.min(rank_sum), tol);
    let a11 = (q1.adjoint() * &a * &q1).hermitian_part();
    let b11 = (q1.adjoint() * &b * &q1).hermitian_part();
    let b12 = q1.adjoint() * &b * &q2;
    let b21 = b12.adjoint();
    let b22 = (q2.adjoint() * &b * &q2).hermitian_part();
    let (t1, t2) = (q1.adjoint() * &b, q2.adjoint() * &b);
    let rows = schedule
        .iter()
        .map(|&lambda| {
            let e = a11.scale(lambda) + &b11;
            let e_t1 = linalg::solve(&e, &t1)?;
            let e_b12 = linalg::solve(&e, &b12)?;
            let schur = &b22 - &b21 * &e_b12;
            let z2 = linalg::solve(&schur, &(&t2 - &b21 * &e_t1))?;
            let z1 = e_t1 - e_b12 * &z2;
            let iterate = &q1 * z1 + &q2 * z2;
            let error = operator_norm(&(&iterate - &target));
            Ok(LimitRow {
                param: lambda,
                iterate,
                error,
                observed_rank: linalg::numerical_rank(&(a.scale(lambda) + &b), tol),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitTrace::new(rows, target, rank_sum))
}

/// Both numerical criteria for `(R(A*), R(B*))` being a separated pair.
#[derive(Debug, Clone)]
pub struct SeparatedPairReport {
    /// `||A†A · B†B||`.
    pub pq_norm: f64,
    /// Condition number of `2I - A†A - B†B`.
    pub two_minus_sum_cond: f64,
    /// Number of principal angles whose cosine exceeds
    /// `1 - SEPARATION_MARGIN`, the numerical `dim R(A*) ∩ R(B*)`.
    pub intersection_dim: usize,
    /// `dim (R(A*) + R(B*))`.
    pub sum_rank: usize,
    pub is_separated: bool,
}

fn separation_from_projectors(p: &Matrix, q: &Matrix, sum_rank: usize, tol: &ToleranceConfig) -> Result<SeparatedPairReport> {
    let n = p.rows();
    // Singular values of PQ are the cosines of the principal angles.
    let cosines = linalg::singular_values(&(p * q));
    let pq_norm = cosines.first().copied().unwrap_or(0.0);
    let two_minus = Matrix::identity(n).scale(2.0) - p - q;
    let two_minus_sum_cond = linalg::condition_number(&two_minus)?;
    let by_norm = pq_norm <= 1.0 - SEPARATION_MARGIN;
    let by_inverse = two_minus_sum_cond <= tol.inv_cond_max;
    if by_norm != by_inverse {
        return Err(WmpError::CriteriaDisagree {
            pq_norm,
            cond: two_minus_sum_cond,
        });
    }
    Ok(SeparatedPairReport {
        pq_norm,
        two_minus_sum_cond,
        intersection_dim: cosines.iter().filter(|&&c| c > 1.0 - SEPARATION_MARGIN).count(),
        sum_rank,
        is_separated: by_norm,
    })
}

/// Decides whether `(R(A*), R(B*))` is a separated pair by both
/// `||A†A B†B|| < 1` and invertibility of `2I - A†A - B†B`. The two must
/// agree; a disagreement is reported as [`WmpError::CriteriaDisagree`].
pub fn separated_pair_check(a: &Matrix, b: &Matrix, tol: &ToleranceConfig) -> Result<SeparatedPairReport> {
    check_cols("separated_pair_check", a, b)?;
    let p = linalg::projector_corange(a, tol);
    let q = linalg::projector_corange(b, tol);
    let sum_rank = stacked_rank(a, b, tol)?;
    separation_from_projectors(&p, &q, sum_rank, tol)
}

/// `A†A` where the rank of `A` is known from structure.
fn corange_with_rank(a: &Matrix, rank: usize, tol: &ToleranceConfig) -> Matrix {
    let dec = linalg::svd(a, tol);
    let vr = dec.vh.block(0, 0, rank.min(dec.sigma.len()), a.cols());
    (vr.adjoint() * &vr).hermitian_part()
}

/// `(A*VA)† A*V`, evaluated as `(V^{1/2} A)† V^{1/2}`.
fn weighted_left_inverse(a: &Matrix, v: &Weight, tol: &ToleranceConfig) -> Result<Matrix> {
    let v_half = v.sqrt()?;
    Ok(linalg::mp_inverse(&(&v_half * a), tol) * v_half)
}

/// `(2I - A†A - Q)^-1 (A*VA)† A*V` and `(A*VA)† A*V - (I - A†A) Pi`.
fn pi_and_d(a: &Matrix, q: &Matrix, v: &Weight, tol: &ToleranceConfig) -> Result<(Matrix, Matrix)> {
    let n = a.cols();
    let p = linalg::projector_corange(a, tol);
    let left = weighted_left_inverse(a, v, tol)?;
    let two_minus = Matrix::identity(n).scale(2.0) - &p - q;
    let pi = linalg::solve(&two_minus, &left)?;
    let d = &left - (Matrix::identity(n) - p) * &pi;
    Ok((pi, d))
}

/// Closed form of `(A*VA + B*WB)† A*V` for a separated pair.
#[derive(Debug, Clone)]
pub struct SeparatedClosedForm {
    pub pi: Matrix,
    pub d: Matrix,
    /// `(A*VA + B*WB)† A*V` computed directly.
    pub direct: Matrix,
    /// `||direct - D||`.
    pub residual: f64,
    /// `||(A*VA + B*W'B)† A*V - D||` for the replacement weight `W'`.
    pub w_prime_residual: f64,
    pub report: SeparatedPairReport,
}

fn direct_product(a: &Matrix, b: &Matrix, v: &Weight, w: &Weight, tol: &ToleranceConfig) -> Result<Matrix> {
    Ok(GramSplit::new(a, b, v, w, tol)?.iterate(1.0, tol)?.0)
}

/// Computes `Pi = (2I - A†A - B†B)^-1 (A*VA)† A*V` and
/// `D = (A*VA)† A*V - (I - A†A) Pi`, checks `D` against the direct
/// product for `W` and for a second weight `W'`.
pub fn closed_form_separated(
    a: &Matrix,
    b: &Matrix,
    v: &Weight,
    w: &Weight,
    w_prime: &Weight,
    tol: &ToleranceConfig,
) -> Result<SeparatedClosedForm> {
    check_pair_weights("closed_form_separated", a, b, v, w)?;
    check_pair_weights("closed_form_separated", a, b, v, w_prime)?;
    let report = separated_pair_check(a, b, tol)?;
    if !report.is_separated {
        return Err(WmpError::NotSeparated {
            pq_norm: report.pq_norm,
            cond: report.two_minus_sum_cond,
        });
    }
    let q = linalg::projector_corange(b, tol);
    let (pi, d) = pi_and_d(a, &q, v, tol)?;
    let direct = direct_product(a, b, v, w, tol)?;
    let residual = operator_norm(&(&direct - &d));
    let other = direct_product(a, b, v, w_prime, tol)?;
    let w_prime_residual = operator_norm(&(&other - &d));
    Ok(SeparatedClosedForm {
        pi,
        d,
        direct,
        residual,
        w_prime_residual,
        report,
    })
}

/// The unique splitting `B = B1 + B2` with `B2* W B1 = 0`,
/// `R(B1*) ⊆ R(A*)` and `(R(A*), R(B2*))` separated.
#[derive(Debug, Clone)]
pub struct BDecomposition {
    pub b1: Matrix,
    pub b2: Matrix,
    /// `Z = A†_{VU}` with `U = A*VA + B*WB + P_null`.
    pub z: Matrix,
    /// `||B2* W B1||`.
    pub orthogonality: f64,
    /// `||(I - A†A) B1*||`.
    pub range_defect: f64,
    /// `rank([A; B]) - rank(A)`, the rank of `B2`.
    pub b2_rank: usize,
    pub separation: SeparatedPairReport,
}

/// Splits `B` as `B1 = B Z A`, `B2 = B - B1` and validates the three
/// defining conditions.
pub fn decompose_b(a: &Matrix, b: &Matrix, v: &Weight, w: &Weight, tol: &ToleranceConfig) -> Result<BDecomposition> {
    check_pair_weights("decompose_b", a, b, v, w)?;
    let omega = omega_weight(a, b, w, Some(v.matrix()), None, tol)?;
    let z = wmp_inverse(a, v, &omega.u, tol)?.inverse;
    let b1 = b * &z * a;
    let b2 = b - &b1;
    let orthogonality = operator_norm(&(b2.adjoint() * w.matrix() * &b1));
    let p = linalg::projector_corange(a, tol);
    let n = a.cols();
    let range_defect = operator_norm(&((Matrix::identity(n) - &p) * b1.adjoint()));
    let rank_a = linalg::numerical_rank(a, tol);
    let sum_rank = stacked_rank(a, b, tol)?;
    let b2_rank = sum_rank - rank_a.min(sum_rank);
    let q = corange_with_rank(&b2, b2_rank, tol);
    let separation = separation_from_projectors(&p, &q, sum_rank, tol)?;
    Ok(BDecomposition {
        b1,
        b2,
        z,
        orthogonality,
        range_defect,
        b2_rank,
        separation,
    })
}

/// The general `t -> 0` limit through the splitting of `B`.
#[derive(Debug, Clone)]
pub struct GeneralLimit {
    /// Iterates of `(A*VA + tB*WB)† A*V` against the closed form.
    pub trace: LimitTrace,
    /// `lim_{t -> 0} (A*VA + tB*WB)† A*V`, from the block form of the
    /// iterate, which stays well defined at `t = 0`.
    pub limit: Matrix,
    /// `||limit - closed form||`.
    pub limit_residual: f64,
    pub pi_prime: Matrix,
    /// `(A*VA)† A*V - (I - A†A) Pi'`.
    pub closed_form: Matrix,
    /// `||(A*VA + B2* W' B2)† A*V - closed form||`.
    pub w_prime_residual: f64,
    /// `||A†_{VU} - closed form||`.
    pub z_residual: f64,
    pub decomposition: BDecomposition,
}

/// Runs [`decompose_b`], forms `Pi' = (2I - A†A - B2†B2)^-1 (A*VA)† A*V`
/// and traces `(A*VA + tB*WB)† A*V` toward the resulting closed form.
pub fn general_limit_via_decomposition(
    a: &Matrix,
    b: &Matrix,
    v: &Weight,
    w: &Weight,
    w_prime: &Weight,
    schedule: &[f64],
    tol: &ToleranceConfig,
) -> Result<GeneralLimit> {
    check_pair_weights("general_limit_via_decomposition", a, b, v, w_prime)?;
    let decomposition = decompose_b(a, b, v, w, tol)?;
    let q2 = corange_with_rank(&decomposition.b2, decomposition.b2_rank, tol);
    let (pi_prime, closed_form) = pi_and_d(a, &q2, v, tol)?;
    let via_w_prime = direct_product(a, &decomposition.b2, v, w_prime, tol)?;
    let w_prime_residual = operator_norm(&(&via_w_prime - &closed_form));
    let z_residual = operator_norm(&(&decomposition.z - &closed_form));
    let trace = t_trace(a, b, v, w, schedule, closed_form.clone(), tol)?;
    let limit = GramSplit::new(a, b, v, w, tol)?.iterate(0.0, tol)?.0;
    let limit_residual = operator_norm(&(&limit - &closed_form));
    Ok(GeneralLimit {
        trace,
        limit,
        limit_residual,
        pi_prime,
        closed_form,
        w_prime_residual,
        z_residual,
        decomposition,
    })
}
