//! Self-adjoint invertible weights.

use crate::error::{Result, WmpError};
use crate::linalg::{self, from_eigen};
use crate::matrix::Matrix;
use crate::tolerance::ToleranceConfig;

/// A Hermitian, numerically invertible matrix used to redefine an inner
/// product. May be indefinite.
///
/// The eigen-decomposition is computed once at construction; the inverse,
/// definiteness flag and square roots all derive from it.
#[derive(Debug, Clone)]
pub struct Weight {
    matrix: Matrix,
    inverse: Matrix,
    positive_definite: bool,
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl Weight {
    /// Validates and caches a weight. Matrices within `verify` tolerance of
    /// Hermitian are replaced by their Hermitian part; anything further off
    /// is rejected, as is anything with condition number above
    /// `inv_cond_max`.
    pub fn new(matrix: Matrix, tol: &ToleranceConfig) -> Result<Self> {
        linalg::require_square(&matrix, "Weight::new")?;
        let defect = linalg::hermitian_defect(&matrix);
        if defect > tol.verify_threshold(linalg::operator_norm(&matrix)) {
            return Err(WmpError::NotHermitian { asymmetry: defect });
        }
        let matrix = matrix.hermitian_part();
        let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(&matrix);
        let cond = eig_condition(&eigenvalues);
        if !(cond.is_finite() && cond <= tol.inv_cond_max) {
            return Err(WmpError::NotInvertible { cond });
        }
        let inverse = from_eigen(&eigenvalues, &eigenvectors, |l| 1.0 / l);
        let positive_definite = eigenvalues.first().is_none_or(|&l| l > 0.0);
        Ok(Weight {
            matrix,
            inverse,
            positive_definite,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn identity(n: usize) -> Self {
        Weight {
            matrix: Matrix::identity(n),
            inverse: Matrix::identity(n),
            positive_definite: true,
            eigenvalues: vec![1.0; n],
            eigenvectors: Matrix::identity(n),
        }
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    #[inline]
    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    #[inline]
    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn condition_number(&self) -> f64 {
        eig_condition(&self.eigenvalues)
    }

    /// The weight `W^{-1}`.
    pub fn inverse_weight(&self) -> Weight {
        let mut eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|l| 1.0 / l).collect();
        let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
        let n = self.dim();
        let eigenvectors =
            Matrix::from_fn(n, n, |r, c| self.eigenvectors.get(r, order[c])).expect("finite");
        eigenvalues = order.iter().map(|&i| eigenvalues[i]).collect();
        Weight {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            positive_definite: self.positive_definite,
            eigenvalues,
            eigenvectors,
        }
    }

    /// Positive square root `W^{1/2}`; only defined for positive-definite weights.
    pub fn sqrt(&self) -> Result<Matrix> {
        self.require_pd("sqrt")?;
        Ok(from_eigen(&self.eigenvalues, &self.eigenvectors, f64::sqrt))
    }

    /// `W^{-1/2}`; only defined for positive-definite weights.
    pub fn inv_sqrt(&self) -> Result<Matrix> {
        self.require_pd("inv_sqrt")?;
        Ok(from_eigen(&self.eigenvalues, &self.eigenvectors, |l| 1.0 / l.sqrt()))
    }

    /// `diag(self, other)`.
    pub fn block_diag(&self, other: &Weight) -> Weight {
        let mut pairs: Vec<(f64, usize)> = self
            .eigenvalues
            .iter()
            .chain(&other.eigenvalues)
            .copied()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let q = Matrix::block_diag(&self.eigenvectors, &other.eigenvectors);
        let n = q.rows();
        let eigenvectors = Matrix::from_fn(n, n, |r, c| q.get(r, pairs[c].1)).expect("finite");
        Weight {
            matrix: Matrix::block_diag(&self.matrix, &other.matrix),
            inverse: Matrix::block_diag(&self.inverse, &other.inverse),
            positive_definite: self.positive_definite && other.positive_definite,
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            eigenvectors,
        }
    }

    fn require_pd(&self, op: &str) -> Result<()> {
        if self.positive_definite {
            Ok(())
        } else {
            Err(WmpError::InvalidArgument(format!(
                "{op} requires a positive-definite weight (smallest eigenvalue {:.3e})",
                self.eigenvalues.first().copied().unwrap_or(0.0)
            )))
        }
    }
}

fn eig_condition(vals: &[f64]) -> f64 {
    let hi = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if vals.is_empty() {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
