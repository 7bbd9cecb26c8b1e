use thiserror::Error;

pub type Result<T> = std::result::Result<T, WmpError>;

/// Errors raised by the library. Every numerical refusal carries the number
/// that triggered it so callers can report it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WmpError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not numerically invertible (condition number {cond:.3e})")]
    NotInvertible { cond: f64 },

    #[error(
        "weighted inverse does not exist: {factor} is singular \
         (cond R_{{A,N}} = {r_cond:.3e}, cond L_{{A,M^-1}} = {l_cond:.3e})"
    )]
    NonExistent {
        factor: &'static str,
        r_cond: f64,
        l_cond: f64,
    },

    #[error("matrix is not idempotent (||Q^2 - Q|| = {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("A*XA + B*WB is not positive definite on R(A*A+B*B) (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveOnRange { min_eig: f64 },

    #[error("{which} is not positive definite on the common null space (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveOnNullspace { which: &'static str, min_eig: f64 },

    #[error("{which} must be positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { which: &'static str, min_eig: f64 },

    #[error("{which} is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPsd { which: &'static str, min_eig: f64 },

    #[error("(R(A*), R(B*)) is not a separated pair (||PQ|| = {pq_norm:.6}, cond(2I-P-Q) = {cond:.3e})")]
    NotSeparated { pq_norm: f64, cond: f64 },

    #[error(
        "separated-pair criteria disagree (||PQ|| = {pq_norm:.12}, cond(2I-P-Q) = {cond:.3e}); \
         borderline instance"
    )]
    CriteriaDisagree { pq_norm: f64, cond: f64 },
}

impl WmpError {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        WmpError::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures that are mathematical (non-existence, violated
    /// preconditions) rather than malformed input.
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            WmpError::InvalidArgument(_)
                | WmpError::DimensionMismatch { .. }
                | WmpError::NonFinite { .. }
        )
    }
}
