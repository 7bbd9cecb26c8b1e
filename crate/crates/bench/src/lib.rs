//! Seeded problem generators shared by the benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wmp_core::{random, Matrix, ToleranceConfig, Weight};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws indefinite weights until one is accepted as invertible.
pub fn weight<R: Rng>(n: usize, rng: &mut R) -> Weight {
    let tol = ToleranceConfig::default();
    loop {
        if let Ok(w) = Weight::new(random::weight_matrix(n, 0.5, rng), &tol) {
            return w;
        }
    }
}

pub fn positive_weight<R: Rng>(n: usize, rng: &mut R) -> Weight {
    Weight::new(random::positive_block(n, rng), &ToleranceConfig::default()).expect("positive block is invertible")
}

/// `(A, M, N)` with `A` of size `n x n` and rank `n / 2`, for which
/// `A†_{MN}` exists.
pub fn wmp_problem(n: usize, seed: u64) -> (Matrix, Weight, Weight) {
    let mut r = rng(seed);
    let tol = ToleranceConfig::default();
    loop {
        let a = random::with_rank(n, n, n / 2, &mut r);
        let (m, w) = (weight(n, &mut r), weight(n, &mut r));
        if wmp_core::wmp_exists(&a, &m, &w, &tol).is_ok_and(|e| e.exists) {
            return (a, m, w);
        }
    }
}

/// `(A, B, V, W)` with positive weights, `A` of size `n/2 x n` and `B` of
/// size `n/2 x n`.
pub fn limit_problem(n: usize, seed: u64) -> (Matrix, Matrix, Weight, Weight) {
    let mut r = rng(seed);
    let k = (n / 2).max(1);
    let a = random::gaussian(k, n, &mut r);
    let b = random::gaussian(k, n, &mut r);
    let v = positive_weight(k, &mut r);
    let w = positive_weight(k, &mut r);
    (a, b, v, w)
}

/// Positive semidefinite `(A, B)` of size `n` with ranks `n/2` and `n - n/2`.
pub fn psd_pair(n: usize, seed: u64) -> (Matrix, Matrix) {
    let mut r = rng(seed);
    let ra = n / 2;
    (random::psd_with_rank(n, ra, &mut r), random::psd_with_rank(n, n - ra, &mut r))
}
