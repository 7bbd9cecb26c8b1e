//! Weighted Moore-Penrose inverses `A†_{MN}` for Hermitian invertible,
//! possibly indefinite, weights.
//!
//! The inverse is computed as `R_{A,N}^-1 · A† · L_{A,M^-1}^-1` with
//! `R_{A,N} = A†A + (I - A†A) N` and `L_{A,M^-1} = AA† + M^-1 (I - AA†)`;
//! it exists exactly when both factors are invertible. Around that formula
//! the crate provides the positive-definite reduction of indefinite
//! weights, the `t -> 0` and `λ -> ∞` limit formulas, separated-pair closed
//! forms and continuity diagnostics.
//!
//! ```
//! use wmp_core::{wmp_inverse, Matrix, ToleranceConfig, Weight};
//!
//! let tol = ToleranceConfig::default();
//! let a = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap();
//! let n = Weight::new(Matrix::from_diagonal(&[1.0, -2.0]).unwrap(), &tol).unwrap();
//! let res = wmp_inverse(&a, &Weight::identity(2), &n, &tol).unwrap();
//! assert!(res.certified(&tol));
//! ```

pub mod continuity;
pub mod embedding;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod matched;
pub mod matrix;
pub mod random;
pub mod reduction;
pub mod schedule;
pub mod tolerance;
pub mod weight;
pub mod wmp;

pub use continuity::{
    perturb_weights_only, run_diagnostics, Column, ContinuityDiagnostics, ContinuityRow, PerturbationSequence,
    Problem, SequenceKind, Trend,
};
pub use embedding::{rho_check, rho_embed, RhoCheck};
pub use error::{Result, WmpError};
pub use limits::{
    closed_form_separated, decompose_b, general_limit_via_decomposition, limit_lambda_to_inf, limit_t_to_zero,
    omega_weight, separated_pair_check, BDecomposition, GeneralLimit, LimitRow, LimitTrace, OmegaWeight,
    SeparatedClosedForm, SeparatedPairReport,
};
pub use linalg::{
    mp_inverse, operator_norm, projector_nullspace_pair, projector_range, regularized_pinv_limit, svd,
    RegularizedLimit, SvdFactorization,
};
pub use matched::matched_projection;
pub use matrix::{c64, Matrix, C64};
pub use reduction::{
    equivalent_domain_weight, equivalent_domain_weights, positive_reduction, weight_transfer_codomain,
    weight_transfer_domain, EquivalentWeights, PositiveReduction, WeightTransfer,
};
pub use tolerance::ToleranceConfig;
pub use weight::Weight;
pub use wmp::{
    l_operator, r_operator, verify_weighted_penrose, weighted_adjoint, wmp_exists, wmp_inverse, wmp_inverse_positive,
    ExistenceReport, PenroseResiduals, WmpResult,
};
