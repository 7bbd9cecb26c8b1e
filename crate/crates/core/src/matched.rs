//! The matched projection of an idempotent:
//!
//! ```text
//! m(Q) = 1/2 (|Q*| + Q*) |Q*|† (|Q*| + I)^-1 (|Q*| + Q),   |Q*| = (QQ*)^{1/2}
//! ```

use crate::error::{Result, WmpError};
use crate::linalg::{self, operator_norm};
use crate::matrix::Matrix;
use crate::tolerance::ToleranceConfig;

/// `m(Q)` for an idempotent `Q`. The result is a Hermitian projector.
///
/// `|Q*|` and its pseudoinverse come from the SVD `Q = U S V*`, so
/// `|Q*| = U S U*` with no eigenvalue clamping needed.
pub fn matched_projection(q: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    linalg::require_square(q, "matched_projection")?;
    let residual = operator_norm(&(q * q - q));
    if residual > tol.verify_threshold(operator_norm(q)) {
        return Err(WmpError::NotIdempotent { residual });
    }
    let n = q.rows();
    let dec = linalg::svd(q, tol);
    let r = dec.numerical_rank;
    let ur = dec.u.block(0, 0, n, r);
    let s = &dec.sigma[..r];
    let scaled = |f: &dyn Fn(f64) -> f64| {
        let mut m = ur.clone().into_dmatrix();
        for (j, &v) in s.iter().enumerate() {
            m.column_mut(j).scale_mut(f(v));
        }
        Matrix::from_dmatrix(m).map(|m| (m * ur.adjoint()).hermitian_part())
    };
    let abs = scaled(&|v| v)?;
    let abs_pinv = scaled(&|v| 1.0 / v)?;
    let id = Matrix::identity(n);
    let right = linalg::solve(&(&abs + &id), &(&abs + q))?;
    let out = (&abs + q.adjoint()) * abs_pinv * right;
    Ok(out.scale(0.5).hermitian_part())
}
