//! Changing weights without changing `A†_{MN}`: the positive-definite
//! replacement `(S_{A,M}, T_{A,N})`, the family of equivalent domain
//! weights, and the one-sided weight-transfer factors.

use rand::Rng;

use crate::error::{Result, WmpError};
use crate::linalg::{self, operator_norm};
use crate::matrix::Matrix;
use crate::random;
use crate::tolerance::ToleranceConfig;
use crate::weight::Weight;
use crate::wmp::{self, check_weights, wmp_inverse, MpParts};

/// Positive-definite weights `S = S_{A,M}` (codomain) and `T = T_{A,N}`
/// (domain) with `A†_{ST} = A†_{MN}`.
#[derive(Debug, Clone)]
pub struct PositiveReduction {
    pub s: Weight,
    pub t: Weight,
    /// `A†_{MN}` computed with the original weights.
    pub original: Matrix,
    /// `A†_{ST}`.
    pub reduced: Matrix,
    /// `||A†_{MN} - A†_{ST}||`.
    pub agreement: f64,
}

/// Builds `T_{A,N} = A†A + N (I - A†A) N` and
/// `S_{A,M} = [AA† + M^-1 (I - AA†) M^-1]^-1`.
pub fn positive_reduction(a: &Matrix, m: &Weight, n: &Weight, tol: &ToleranceConfig) -> Result<PositiveReduction> {
    let original = wmp_inverse(a, m, n, tol)?;
    let parts = MpParts::new(a, tol);
    let (dim_h, dim_k) = (a.cols(), a.rows());
    let t_mat = &parts.p_corange
        + n.matrix() * (Matrix::identity(dim_h) - &parts.p_corange) * n.matrix();
    let s_inv = &parts.p_range + m.inverse() * (Matrix::identity(dim_k) - &parts.p_range) * m.inverse();
    let t = Weight::new(t_mat, tol)?;
    let s = Weight::new(s_inv, tol)?.inverse_weight();
    for (name, w) in [("T_{A,N}", &t), ("S_{A,M}", &s)] {
        if !w.is_positive_definite() {
            return Err(WmpError::NotPositiveDefinite {
                which: name,
                min_eig: w.eigenvalues()[0],
            });
        }
    }
    let reduced = wmp_inverse(a, &s, &t, tol)?.inverse;
    let agreement = operator_norm(&(&original.inverse - &reduced));
    Ok(PositiveReduction {
        s,
        t,
        original: original.inverse,
        reduced,
        agreement,
    })
}

/// Equivalent domain weights `Ñ` with `A†_{I Ñ} = A†_{I N}`.
#[derive(Debug, Clone)]
pub enum EquivalentWeights {
    /// `A†A` is `0` or `I`; every positive-definite `Ñ` qualifies, so no
    /// block characterization applies.
    Degenerate { rank: usize, dim: usize },
    Samples(Vec<Weight>),
}

/// Block data of `N` in the basis splitting `H = R(A*) ⊕ N(A)`.
struct DomainBlocks {
    /// Orthonormal basis of `R(A*)` followed by one of `N(A)`.
    basis: Matrix,
    rank: usize,
    /// `N_0 = N22^-1 N21`.
    n0: Matrix,
    n21: Matrix,
    n22: Matrix,
}

fn domain_blocks(a: &Matrix, n: &Weight, tol: &ToleranceConfig) -> Result<Option<DomainBlocks>> {
    let rep = wmp::wmp_exists(a, &Weight::identity(a.rows()), n, tol)?;
    if !rep.r_invertible {
        return Err(rep.into_error());
    }
    let parts = MpParts::new(a, tol);
    let (range, complement) = linalg::projector_bases(&parts.p_corange);
    let (rank, dim) = (range.cols(), a.cols());
    if rank == 0 || rank == dim {
        return Ok(None);
    }
    let n21 = complement.adjoint() * n.matrix() * &range;
    let n22 = (complement.adjoint() * n.matrix() * &complement).hermitian_part();
    let n0 = linalg::solve(&n22, &n21)?;
    let basis = Matrix::from_fn(dim, dim, |i, j| {
        if j < rank {
            range.get(i, j)
        } else {
            complement.get(i, j - rank)
        }
    })?;
    Ok(Some(DomainBlocks {
        basis,
        rank,
        n0,
        n21,
        n22,
    }))
}

/// Assembles the equivalent weight
///
/// ```text
/// Ñ = U* [[S + N0* L N0, N0* L], [L N0, L]] U
/// ```
///
/// in the `R(A*) ⊕ N(A)` basis `U`, from a positive-definite Schur block
/// `S` (size `rank A`) and a positive-definite lower block `L`.
pub fn equivalent_domain_weight(
    a: &Matrix,
    n: &Weight,
    schur_block: &Matrix,
    lower_block: &Matrix,
    tol: &ToleranceConfig,
) -> Result<Weight> {
    let blocks = domain_blocks(a, n, tol)?.ok_or_else(|| {
        WmpError::InvalidArgument("A†A is 0 or I; the block characterization does not apply".into())
    })?;
    assemble(&blocks, schur_block, lower_block, tol)
}

fn assemble(blocks: &DomainBlocks, schur: &Matrix, lower: &Matrix, tol: &ToleranceConfig) -> Result<Weight> {
    let r = blocks.rank;
    let k = blocks.basis.rows() - r;
    if schur.shape() != (r, r) || lower.shape() != (k, k) {
        return Err(WmpError::dims(
            "equivalent_domain_weight",
            format!("expected {r}x{r} and {k}x{k} blocks"),
        ));
    }
    for (which, b) in [("Schur block", schur), ("lower block", lower)] {
        if !linalg::is_positive_definite(b, tol)? {
            return Err(WmpError::NotPositiveDefinite {
                which,
                min_eig: linalg::min_eigenvalue(b),
            });
        }
    }
    let n0 = &blocks.n0;
    let l_n0 = lower * n0;
    let top_left = schur + n0.adjoint() * &l_n0;
    let top_right = n0.adjoint() * lower;
    let dim = r + k;
    let inner = Matrix::from_fn(dim, dim, |i, j| match (i < r, j < r) {
        (true, true) => top_left.get(i, j),
        (true, false) => top_right.get(i, j - r),
        (false, true) => l_n0.get(i - r, j),
        (false, false) => lower.get(i - r, j - r),
    })?;
    Weight::new(&blocks.basis * inner * blocks.basis.adjoint(), tol)
}

/// Samples positive-definite `Ñ` with `A†_{I Ñ} = A†_{I N}` by drawing the
/// two free blocks as `G*G + delta I`.
pub fn equivalent_domain_weights<R: Rng + ?Sized>(
    a: &Matrix,
    n: &Weight,
    samples: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<EquivalentWeights> {
    let Some(blocks) = domain_blocks(a, n, tol)? else {
        let rank = linalg::numerical_rank(a, tol);
        return Ok(EquivalentWeights::Degenerate { rank, dim: a.cols() });
    };
    let k = blocks.basis.rows() - blocks.rank;
    let weights = (0..samples)
        .map(|_| {
            let schur = random::positive_block(blocks.rank, rng);
            let lower = random::positive_block(k, rng);
            assemble(&blocks, &schur, &lower, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalentWeights::Samples(weights))
}

/// The member of the family that reproduces `T_{A,N}`: lower block `N22^2`
/// and Schur block `I`.
pub fn t_weight_from_blocks(a: &Matrix, n: &Weight, tol: &ToleranceConfig) -> Result<Option<Weight>> {
    let Some(blocks) = domain_blocks(a, n, tol)? else {
        return Ok(None);
    };
    // Ñ22 = N22², Ñ21 = N22 N21, Ñ11 = I + N21* N21, so Ñ11 - N0* Ñ22 N0 = I.
    debug_assert_eq!(blocks.n21.rows(), blocks.n22.rows());
    let lower = (&blocks.n22 * &blocks.n22).hermitian_part();
    assemble(&blocks, &Matrix::identity(blocks.rank), &lower, tol).map(Some)
}

/// A weight-transfer factor and the residual of the identity it satisfies.
#[derive(Debug, Clone)]
pub struct WeightTransfer {
    pub factor: Matrix,
    /// `||A†_{MN1} - R · A†_{MN2}||` (domain) or
    /// `||A†_{M1N} - A†_{M2N} · L||` (codomain).
    pub residual: f64,
}

/// `R_{M;N1,N2} = A†_{MN1} A + (I - A†_{MN1} A) N1^-1 N2`, which satisfies
/// `A†_{MN1} = R_{M;N1,N2} · A†_{MN2}`.
pub fn weight_transfer_domain(
    a: &Matrix,
    m: &Weight,
    n1: &Weight,
    n2: &Weight,
    tol: &ToleranceConfig,
) -> Result<WeightTransfer> {
    check_weights("weight_transfer_domain", a, m, n2)?;
    let x1 = wmp_inverse(a, m, n1, tol)?.inverse;
    let x2 = wmp_inverse(a, m, n2, tol)?.inverse;
    let x1a = &x1 * a;
    let factor = &x1a + (Matrix::identity(a.cols()) - &x1a) * n1.inverse() * n2.matrix();
    let residual = operator_norm(&(&x1 - &factor * &x2));
    Ok(WeightTransfer { factor, residual })
}

/// `L_{M1,M2;N} = A A†_{M1N} + M2^-1 M1 (I - A A†_{M1N})`, which satisfies
/// `A†_{M1N} = A†_{M2N} · L_{M1,M2;N}`.
pub fn weight_transfer_codomain(
    a: &Matrix,
    m1: &Weight,
    m2: &Weight,
    n: &Weight,
    tol: &ToleranceConfig,
) -> Result<WeightTransfer> {
    check_weights("weight_transfer_codomain", a, m2, n)?;
    let x1 = wmp_inverse(a, m1, n, tol)?.inverse;
    let x2 = wmp_inverse(a, m2, n, tol)?.inverse;
    let ax1 = a * &x1;
    let factor = &ax1 + m2.inverse() * m1.matrix() * (Matrix::identity(a.rows()) - &ax1);
    let residual = operator_norm(&(&x1 - &x2 * &factor));
    Ok(WeightTransfer { factor, residual })
}
