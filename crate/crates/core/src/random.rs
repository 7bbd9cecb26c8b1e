//! Random test-instance generators shared by the test suites, the CLI's
//! randomized checks and the benchmarks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c64, Matrix, C64};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian matrix with unit-variance entries.
pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::wrap(DMatrix::from_fn(rows, cols, |_, _| {
        c64(normal(rng) * s, normal(rng) * s)
    }))
}

/// Real Gaussian matrix (zero imaginary parts).
pub fn gaussian_real<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::wrap(DMatrix::from_fn(rows, cols, |_, _| c64(normal(rng), 0.0)))
}

/// Random `rows x cols` matrix of exact rank `rank` (generically), built as
/// a product of Gaussian factors.
pub fn with_rank<R: Rng + ?Sized>(rows: usize, cols: usize, rank: usize, rng: &mut R) -> Matrix {
    let rank = rank.min(rows).min(cols);
    if rank == 0 {
        return Matrix::zeros(rows, cols);
    }
    let f = gaussian(rows, rank, rng);
    let g = gaussian(rank, cols, rng);
    (f * g).scale(1.0 / (rank as f64).sqrt())
}

/// Random `rows x cols` matrix with prescribed nonzero singular values.
pub fn with_singular_values<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    sigma: &[f64],
    rng: &mut R,
) -> Matrix {
    let k = sigma.len().min(rows).min(cols);
    let u = unitary(rows, rng).block(0, 0, rows, k);
    let v = unitary(cols, rng).block(0, 0, cols, k);
    let mut us = u.into_dmatrix();
    for (j, s) in sigma.iter().take(k).enumerate() {
        us.column_mut(j).scale_mut(*s);
    }
    Matrix::wrap(us) * v.adjoint()
}

/// Haar-like random unitary from the QR factorization of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let g = gaussian(n, n, rng).into_dmatrix();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution does not depend on the QR sign convention.
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c64(1.0, 0.0)
            }
        })
        .collect();
    Matrix::wrap(DMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]))
}

/// Hermitian matrix `Q diag(eigs) Q*` with a random unitary `Q`.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(eigs: &[f64], rng: &mut R) -> Matrix {
    let n = eigs.len();
    let q = unitary(n, rng);
    crate::linalg::from_eigen(eigs, &q, |l| l)
}

/// Well-conditioned Hermitian weight: eigenvalue magnitudes in `[0.5, 2]`,
/// each negative with probability `p_negative`.
pub fn weight_matrix<R: Rng + ?Sized>(n: usize, p_negative: f64, rng: &mut R) -> Matrix {
    let eigs: Vec<f64> = (0..n)
        .map(|_| {
            let mag = 0.5 * 4f64.powf(rng.random::<f64>());
            if rng.random::<f64>() < p_negative {
                -mag
            } else {
                mag
            }
        })
        .collect();
    hermitian_with_spectrum(&eigs, rng)
}

/// Positive-definite matrix `G*G + delta I` with Gaussian `G` and
/// `delta = 1e-3 ||G*G||`.
pub fn positive_block<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = gaussian(n, n, rng);
    let gram = (g.adjoint() * &g).hermitian_part();
    let delta = 1e-3 * crate::linalg::operator_norm(&gram);
    gram + Matrix::identity(n).scale(delta.max(f64::MIN_POSITIVE))
}

/// Random Hermitian positive-semidefinite matrix of the given rank,
/// `G*G` with `G` a `rank x n` Gaussian (complex Wishart).
pub fn psd_with_rank<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Matrix {
    let g = gaussian(rank.min(n), n, rng);
    (g.adjoint() * g).hermitian_part()
}
