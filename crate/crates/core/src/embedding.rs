//! The self-adjoint dilation `rho(A) = [[0, A], [A*, 0]]` with block weight
//! `T = diag(M, N^-1)`. `A†_{MN}` exists exactly when `rho(A)†_{T,T^-1}`
//! does, and then it sits in the lower-left block.

use crate::error::Result;
use crate::linalg::operator_norm;
use crate::matrix::Matrix;
use crate::tolerance::ToleranceConfig;
use crate::weight::Weight;
use crate::wmp::{check_weights, wmp_inverse};

/// `rho(A)` and `T = diag(M, N^-1)`.
pub fn rho_embed(a: &Matrix, m: &Weight, n: &Weight) -> Result<(Matrix, Weight)> {
    check_weights("rho_embed", a, m, n)?;
    let (k, h) = a.shape();
    let dim = k + h;
    let ah = a.adjoint();
    let rho = Matrix::from_fn(dim, dim, |i, j| match (i < k, j < k) {
        (true, false) => a.get(i, j - k),
        (false, true) => ah.get(i - k, j),
        _ => Default::default(),
    })?;
    Ok((rho, m.block_diag(&n.inverse_weight())))
}

/// Comparison of the embedded inverse with the direct one.
#[derive(Debug, Clone)]
pub struct RhoCheck {
    /// `rho(A)†_{T,T^-1}`.
    pub embedded: Matrix,
    /// `A†_{MN}`.
    pub direct: Matrix,
    /// `||lower-left block - A†_{MN}||`.
    pub lower_left: f64,
    /// `||upper-right block - (A†_{MN})*||`.
    pub upper_right: f64,
    /// Largest entry magnitude in the two diagonal blocks.
    pub diagonal: f64,
}

pub fn rho_check(a: &Matrix, m: &Weight, n: &Weight, tol: &ToleranceConfig) -> Result<RhoCheck> {
    let (rho, t) = rho_embed(a, m, n)?;
    let direct = wmp_inverse(a, m, n, tol)?.inverse;
    let embedded = wmp_inverse(&rho, &t, &t.inverse_weight(), tol)?.inverse;
    let (k, h) = a.shape();
    let lower_left = operator_norm(&(embedded.block(k, 0, h, k) - &direct));
    let upper_right = operator_norm(&(embedded.block(0, k, k, h) - direct.adjoint()));
    let diagonal = embedded.block(0, 0, k, k).max_abs().max(embedded.block(k, k, h, h).max_abs());
    Ok(RhoCheck {
        embedded,
        direct,
        lower_left,
        upper_right,
        diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;

    #[test]
    fn zero_operator() {
        let tol = ToleranceConfig::default();
        let a = Matrix::zeros(2, 3);
        let c = rho_check(&a, &Weight::identity(2), &Weight::identity(3), &tol).unwrap();
        assert_eq!(c.embedded.max_abs(), 0.0);
    }

    #[test]
    fn norm_is_preserved() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let a = random::gaussian(3, 5, &mut rng);
            let (rho, _) = rho_embed(&a, &Weight::identity(3), &Weight::identity(5)).unwrap();
            assert!((operator_norm(&rho) - operator_norm(&a)).abs() < 1e-13);
        }
    }
}
