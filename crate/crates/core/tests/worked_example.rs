mod common;

use common::*;
use wmp_core::linalg::{self, solve};
use wmp_core::reduction::t_weight_from_blocks;
use wmp_core::*;

#[test]
fn mp_inverse_matches_fractions() {
    let mp = mp_inverse(&example_a(), &tol());
    assert!(max_entry_diff(&mp, &example_mp()) <= 1e-12);
}

#[test]
fn r_and_l_factors_match_fractions() {
    let a = example_a();
    let r = r_operator(&a, &example_n(), &tol()).unwrap();
    assert!(max_entry_diff(&r, &example_r()) <= 1e-12);
    let m = weight(example_m());
    let l = l_operator(&a, m.inverse(), &tol()).unwrap();
    assert!(max_entry_diff(&l, &Matrix::identity(4)) <= 1e-12);
}

#[test]
fn weighted_inverse_matches_fractions() {
    let res = wmp_inverse(&example_a(), &weight(example_m()), &weight(example_n()), &tol()).unwrap();
    assert!(res.existence.exists);
    assert!(max_entry_diff(&res.inverse, &example_wmp()) <= 1e-12);
    assert!(res.penrose.all_below(1e-10));
}

#[test]
fn weights_are_positive_definite() {
    assert!(linalg::is_positive_definite(&example_n(), &tol()).unwrap());
    assert!(linalg::is_positive_definite(&example_m(), &tol()).unwrap());
}

#[test]
fn oracle_for_positive_weights_agrees() {
    let (m, n) = (weight(example_m()), weight(example_n()));
    let x = wmp_inverse_positive(&example_a(), &m, &n, &tol()).unwrap();
    assert!(max_entry_diff(&x, &example_wmp()) <= 1e-12);
}

#[test]
fn positive_reduction_reproduces_inverse() {
    let a = example_a();
    let (m, n) = (weight(example_m()), weight(example_n()));
    let red = positive_reduction(&a, &m, &n, &tol()).unwrap();
    assert!(max_entry_diff(&red.reduced, &example_wmp()) <= 1e-12);
    // T = R*R and S = (LL*)^-1 with L = I.
    let r = example_r();
    assert!(operator_norm(&(red.t.matrix() - r.adjoint() * &r)) <= 1e-12);
    assert!(operator_norm(&(red.s.matrix() - Matrix::identity(4))) <= 1e-12);
}

#[test]
fn domain_transfer_recovers_r_factor() {
    let a = example_a();
    let n = weight(example_n());
    let id = Weight::identity(4);
    let tr = weight_transfer_domain(&a, &id, &id, &n, &tol()).unwrap();
    assert!(max_entry_diff(&tr.factor, &example_r()) <= 1e-12);
    assert!(tr.residual <= 1e-12);
}

#[test]
fn rho_embedding_recovers_inverse() {
    let c = rho_check(&example_a(), &weight(example_m()), &weight(example_n()), &tol()).unwrap();
    let lower = c.embedded.block(4, 0, 4, 4);
    assert!(max_entry_diff(&lower, &example_wmp()) <= 1e-10);
    assert!(c.upper_right <= 1e-10 && c.diagonal <= 1e-10);
}

#[test]
fn regularized_limit_on_example() {
    let sched: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
    let lim = regularized_pinv_limit(&example_a(), &sched, &tol()).unwrap();
    assert!(lim.final_error() <= 1e-6);
    assert!(max_entry_diff(&lim.target, &example_mp()) <= 1e-12);
}

#[test]
fn t_limit_on_example_with_complement_b() {
    let a = example_a();
    let m = weight(example_m());
    let p = linalg::projector_nullspace_pair(&a, &Matrix::zeros(1, 4), &tol()).unwrap();
    let b = p.clone();
    let w = Weight::identity(4);
    let om = omega_weight(&a, &b, &w, Some(m.matrix()), None, &tol()).unwrap();
    let trace = limit_t_to_zero(&a, &b, &m, &w, &om, &schedule::default_t_schedule(), &tol()).unwrap();
    assert!(trace.converged, "final error {}", trace.final_error());
    // Independent route to A†_{MU}: both weights are positive definite.
    let oracle = wmp_inverse_positive(&a, &m, &om.u, &tol()).unwrap();
    assert!(operator_norm(&(&oracle - &trace.target)) <= 1e-10);
    let red = positive_reduction(&a, &m, &om.u, &tol()).unwrap();
    assert!(operator_norm(&(&red.reduced - &trace.target)) <= 1e-10);
}

#[test]
fn t_weight_from_block_family() {
    let a = example_a();
    let n = weight(example_n());
    let t = t_weight_from_blocks(&a, &n, &tol()).unwrap().expect("rank 3 of 4");
    let red = positive_reduction(&a, &weight(example_m()), &n, &tol()).unwrap();
    assert!(operator_norm(&(t.matrix() - red.t.matrix())) <= 1e-11);
}

#[test]
fn mp_inverse_against_vectorized_penrose_system() {
    // A = F G with F 5x2, G 2x3 of full rank; A† = G* Z F* where
    // (G G*) Z (F* F) = I, solved as a 4x4 linear system in vec(Z).
    let mut r = rng(5);
    let f = random::gaussian(5, 2, &mut r);
    let g = random::gaussian(2, 3, &mut r);
    let a = &f * &g;
    let ggh = &g * g.adjoint();
    let fhf = f.adjoint() * &f;
    // vec(G Z F) = (F^T ⊗ G) vec(Z) with column-major vec.
    let kron = Matrix::from_fn(4, 4, |i, j| {
        let (gi, fi) = (i % 2, i / 2);
        let (gj, fj) = (j % 2, j / 2);
        fhf.get(fj, fi) * ggh.get(gi, gj)
    })
    .unwrap();
    let rhs = real(4, 1, &[1.0, 0.0, 0.0, 1.0]);
    let z_vec = solve(&kron, &rhs).unwrap();
    let z = Matrix::from_fn(2, 2, |i, j| z_vec.get(i + 2 * j, 0)).unwrap();
    let oracle = g.adjoint() * z * f.adjoint();
    let x = mp_inverse(&a, &tol());
    assert!(operator_norm(&(&x - &oracle)) <= 1e-10 * (1.0 + operator_norm(&oracle)));
    let res = verify_weighted_penrose(&a, &Weight::identity(5), &Weight::identity(3), &x).unwrap();
    assert!(res.all_below(tol().verify_atol));
}

#[test]
fn matched_projection_closed_form() {
    // For Q = [[1, 1], [0, 0]], |Q*| = diag(sqrt 2, 0) and the formula
    // evaluates to the projector onto span{(1 + sqrt 2, 1)}.
    let q = real(2, 2, &[1.0, 1.0, 0.0, 0.0]);
    let m = matched_projection(&q, &tol()).unwrap();
    let s = 2f64.sqrt();
    let expect = real(2, 2, &[(2.0 + s) / 4.0, 1.0 / (2.0 * s), 1.0 / (2.0 * s), (2.0 - s) / 4.0]);
    assert!(max_entry_diff(&m, &expect) <= 1e-14);
    assert!(operator_norm(&(&m * &m - &m)) <= 1e-14);
    assert!(linalg::hermitian_defect(&m) == 0.0);
}
