#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use wmp_core::{random, Matrix, ToleranceConfig, Weight};

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real(rows: usize, cols: usize, v: &[f64]) -> Matrix {
    Matrix::from_real(rows, cols, v).unwrap()
}

pub fn weight(m: Matrix) -> Weight {
    Weight::new(m, &tol()).unwrap()
}

pub fn example_a() -> Matrix {
    real(
        4,
        4,
        &[
            1.0, 0.0, 1.0, -1.0, //
            0.0, 0.0, 1.0, 3.0, //
            0.0, -2.0, 0.0, 2.0, //
            0.0, 0.0, 0.0, 0.0,
        ],
    )
}

pub fn example_m() -> Matrix {
    real(
        4,
        4,
        &[
            2.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

pub fn example_n() -> Matrix {
    real(
        4,
        4,
        &[
            2.0, 1.0, 1.0, 0.0, //
            1.0, 2.0, 0.0, 0.0, //
            1.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

pub fn example_mp() -> Matrix {
    real(
        4,
        4,
        &[
            11.0 / 27.0, 1.0 / 27.0, 2.0 / 27.0, 0.0, //
            -4.0 / 27.0, 7.0 / 27.0, -13.0 / 27.0, 0.0, //
            4.0 / 9.0, 2.0 / 9.0, -1.0 / 18.0, 0.0, //
            -4.0 / 27.0, 7.0 / 27.0, 1.0 / 54.0, 0.0,
        ],
    )
}

pub fn example_r() -> Matrix {
    real(
        4,
        4,
        &[
            35.0 / 27.0, 20.0 / 27.0, 16.0 / 27.0, 0.0, //
            2.0 / 27.0, 32.0 / 27.0, 4.0 / 27.0, 0.0, //
            -2.0 / 9.0, -5.0 / 9.0, 5.0 / 9.0, 0.0, //
            2.0 / 27.0, 5.0 / 27.0, 4.0 / 27.0, 1.0,
        ],
    )
}

pub fn example_wmp() -> Matrix {
    real(
        4,
        4,
        &[
            1.0 / 7.0, -2.0 / 7.0, 3.0 / 7.0, 0.0, //
            -3.0 / 14.0, 5.0 / 28.0, -11.0 / 28.0, 0.0, //
            9.0 / 14.0, 13.0 / 28.0, -9.0 / 28.0, 0.0, //
            -3.0 / 14.0, 5.0 / 28.0, 3.0 / 28.0, 0.0,
        ],
    )
}

pub fn max_entry_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).max_abs()
}

/// A random problem for the Penrose suites: shapes up to 12x10, any rank,
/// weights indefinite with probability 1/2 per instance.
pub struct Instance {
    pub a: Matrix,
    pub m: Weight,
    pub n: Weight,
    pub rank: usize,
    pub indefinite: bool,
}

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let rows = rng.random_range(1..=12);
    let cols = rng.random_range(1..=10);
    let rank = rng.random_range(0..=rows.min(cols));
    let a = if rng.random::<bool>() {
        random::with_rank(rows, cols, rank, rng)
    } else {
        let g = random::gaussian_real(rows, rank, rng);
        let h = random::gaussian_real(rank, cols, rng);
        if rank == 0 { Matrix::zeros(rows, cols) } else { g * h }
    };
    let indefinite = rng.random::<bool>();
    let p_neg = if indefinite { 0.5 } else { 0.0 };
    let m = Weight::new(random::weight_matrix(rows, p_neg, rng), &tol()).unwrap();
    let n = Weight::new(random::weight_matrix(cols, p_neg, rng), &tol()).unwrap();
    Instance {
        a,
        m,
        n,
        rank,
        indefinite,
    }
}

pub fn positive_weight<R: Rng>(n: usize, rng: &mut R) -> Weight {
    Weight::new(random::weight_matrix(n, 0.0, rng), &tol()).unwrap()
}
