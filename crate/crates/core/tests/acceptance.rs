//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use wmp_core::continuity::tail_window;
use wmp_core::limits::SEPARATION_MARGIN;
use wmp_core::linalg::{self, projector_corange};
use wmp_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn worked_example() -> Outcome {
    let (a, m, n) = (example_a(), weight(example_m()), weight(example_n()));
    let run = || {
        let res = wmp_inverse(&a, &m, &n, &tol()).unwrap();
        (res.mp, res.r_factor, res.inverse)
    };
    let (mp, r, x) = run();
    let err = max_entry_diff(&mp, &example_mp())
        .max(max_entry_diff(&r, &example_r()))
        .max(max_entry_diff(&x, &example_wmp()));
    let times: Vec<Duration> = (0..25)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(run());
            t.elapsed()
        })
        .collect();
    let t = median(times);
    outcome(
        err <= 1e-12 && t < Duration::from_millis(1),
        format!("max entry error {err:.2e}, median runtime {:.1} us", t.as_secs_f64() * 1e6),
    )
}

const SUITE_SEED: u64 = 20_240_601;

fn penrose_suite() -> Outcome {
    let mut r = rng(SUITE_SEED);
    let start = Instant::now();
    let (mut existing, mut worst, mut failures) = (0, 0.0f64, 0);
    for _ in 0..500 {
        let inst = random_instance(&mut r);
        if let Ok(res) = wmp_inverse(&inst.a, &inst.m, &inst.n, &tol()) {
            existing += 1;
            worst = worst.max(res.penrose.max());
            if !res.penrose.all_below(1e-9) {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(5),
        format!(
            "{existing}/500 exist, worst residual {worst:.2e}, {failures} above 1e-9, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn reduction_suite() -> Outcome {
    let mut r = rng(SUITE_SEED);
    let (mut checked, mut worst, mut failures) = (0, 0.0f64, 0);
    for _ in 0..500 {
        let inst = random_instance(&mut r);
        let Ok(red) = positive_reduction(&inst.a, &inst.m, &inst.n, &tol()) else {
            continue;
        };
        checked += 1;
        let rel = red.agreement / (1.0 + operator_norm(&red.original));
        worst = worst.max(rel);
        let pd = red.s.is_positive_definite()
            && red.t.is_positive_definite()
            && linalg::is_positive_definite(red.s.matrix(), &tol()).unwrap()
            && linalg::is_positive_definite(red.t.matrix(), &tol()).unwrap();
        if rel > 1e-8 || !pd {
            failures += 1;
        }
    }
    outcome(
        failures == 0 && checked > 0,
        format!("{checked} existing instances, worst scaled gap {worst:.2e}, {failures} failures"),
    )
}

fn oracle_suite() -> Outcome {
    let mut r = rng(4);
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..200 {
        let rows = r.random_range(1..=12);
        let cols = r.random_range(1..=10);
        let rank = r.random_range(0..=rows.min(cols));
        let a = random::with_rank(rows, cols, rank, &mut r);
        let m = positive_weight(rows, &mut r);
        let n = positive_weight(cols, &mut r);
        let x = wmp_inverse(&a, &m, &n, &tol()).unwrap().inverse;
        let oracle = wmp_inverse_positive(&a, &m, &n, &tol()).unwrap();
        let rel = operator_norm(&(&x - &oracle)) / operator_norm(&oracle).max(f64::MIN_POSITIVE);
        let rel = if operator_norm(&oracle) == 0.0 { operator_norm(&x) } else { rel };
        worst = worst.max(rel);
        if rel > 1e-8 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("worst relative error {worst:.2e}, {failures} failures"))
}

/// `(A, B)` sharing some row-space directions, with a possibly nontrivial
/// common null space.
fn limit_pair<R: Rng>(r: &mut R) -> (Matrix, Matrix) {
    let n = r.random_range(2..=7);
    let ka = r.random_range(1..=7);
    let kb = r.random_range(1..=6);
    let ra = r.random_range(1..=ka.min(n));
    let rb = r.random_range(1..=kb.min(n));
    (random::with_rank(ka, n, ra, r), random::with_rank(kb, n, rb, r))
}

fn key_limit_suite() -> Outcome {
    let mut r = rng(5);
    let sched = schedule::default_t_schedule();
    let (mut worst, mut worst_u, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..100 {
        let (a, b) = limit_pair(&mut r);
        let v = positive_weight(a.rows(), &mut r);
        let w = positive_weight(b.rows(), &mut r);
        let u1 = omega_weight(&a, &b, &w, Some(v.matrix()), None, &tol()).unwrap();
        let x2 = random::weight_matrix(a.rows(), 0.0, &mut r);
        let y2 = random::positive_block(a.cols(), &mut r);
        let u2 = omega_weight(&a, &b, &w, Some(&x2), Some(&y2), &tol()).unwrap();
        let tr = limit_t_to_zero(&a, &b, &v, &w, &u1, &sched, &tol()).unwrap();
        let target2 = wmp_inverse(&a, &v, &u2.u, &tol()).unwrap().inverse;
        let scale = 1.0 + operator_norm(&tr.target);
        let err = tr.final_error() / scale;
        let u_gap = operator_norm(&(&tr.target - &target2)) / scale;
        worst = worst.max(err);
        worst_u = worst_u.max(u_gap);
        let monotone = tr.tail_nonincreasing(5, tr.noise_floor(&tol()));
        if err > 1e-6 || !monotone || u_gap > tol().verify_atol {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("worst scaled error at t=1e-10 {worst:.2e}, worst U-gap {worst_u:.2e}, {failures} failures"),
    )
}

fn lambda_suite() -> Outcome {
    let mut r = rng(6);
    let sched = schedule::default_lambda_schedule();
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..100 {
        let n = r.random_range(1..=8);
        let a = random::psd_with_rank(n, r.random_range(0..=n), &mut r);
        let b = random::psd_with_rank(n, r.random_range(0..=n), &mut r);
        let tr = limit_lambda_to_inf(&a, &b, &sched, &tol()).unwrap();
        let err = tr.final_error();
        worst = worst.max(err);
        if err > 1e-6 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("worst error at λ=1e8 {worst:.2e}, {failures} failures"))
}

/// `(A, B)` whose row spaces are in general position with
/// `rank A + rank B <= n`, hence separated.
fn separated_pair<R: Rng>(r: &mut R, k: usize, e: usize, n: usize) -> (Matrix, Matrix) {
    let ra = r.random_range(1..=(n - 1).min(k));
    let rb = r.random_range(0..=(n - ra).min(e));
    (random::with_rank(k, n, ra, r), random::with_rank(e, n, rb, r))
}

fn separated_suite() -> Outcome {
    let mut r = rng(7);
    let (mut worst, mut worst_w, mut failures) = (0.0f64, 0.0f64, 0);
    let mut generated = 0;
    while generated < 100 {
        let (a, b) = separated_pair(&mut r, 6, 5, 4);
        let v = positive_weight(6, &mut r);
        let w = positive_weight(5, &mut r);
        let w1 = positive_weight(5, &mut r);
        let w2 = weight(random::weight_matrix(5, 0.0, &mut r).scale(1e-3));
        let cf = match closed_form_separated(&a, &b, &v, &w, &w1, &tol()) {
            Ok(cf) => cf,
            // A generated pair too close to overlapping is not a test case.
            Err(WmpError::NotSeparated { .. } | WmpError::CriteriaDisagree { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        generated += 1;
        let cf2 = closed_form_separated(&a, &b, &v, &w, &w2, &tol()).unwrap();
        worst = worst.max(cf.residual);
        let w_gap = cf.w_prime_residual.max(cf2.w_prime_residual);
        worst_w = worst_w.max(w_gap);
        if cf.residual > 1e-9 || w_gap > 1e-9 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("worst ||direct - D|| {worst:.2e}, worst W-replacement gap {worst_w:.2e}, {failures} failures"),
    )
}

fn decomposition_suite() -> Outcome {
    let mut r = rng(8);
    let sched = schedule::default_t_schedule();
    let (mut worst_orth, mut worst_range, mut worst_lim, mut failures) = (0.0f64, 0.0f64, 0.0f64, 0);
    let mut worst_trace = 0.0f64;
    for _ in 0..100 {
        let (a, b) = limit_pair(&mut r);
        let v = positive_weight(a.rows(), &mut r);
        let w = positive_weight(b.rows(), &mut r);
        let w_prime = positive_weight(b.rows(), &mut r);
        let g = general_limit_via_decomposition(&a, &b, &v, &w, &w_prime, &sched, &tol()).unwrap();
        let d = &g.decomposition;
        worst_orth = worst_orth.max(d.orthogonality);
        worst_range = worst_range.max(d.range_defect);
        worst_lim = worst_lim.max(g.limit_residual);
        worst_trace = worst_trace.max(g.trace.final_error());
        let sum_ok = operator_norm(&(&d.b1 + &d.b2 - &b)) <= 1e-9;
        if d.orthogonality > 1e-9
            || d.range_defect > 1e-9
            || !d.separation.is_separated
            || g.limit_residual > 1e-6
            || !sum_ok
        {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "worst ||B2*WB1|| {worst_orth:.2e}, worst ||(I-A†A)B1*|| {worst_range:.2e}, \
             worst gap to the t -> 0 limit {worst_lim:.2e} (t=1e-10 iterate {worst_trace:.2e}), {failures} failures"
        ),
    )
}

fn rho_suite() -> Outcome {
    let mut r = rng(9);
    let (mut checked, mut worst, mut failures) = (0, 0.0f64, 0);
    for _ in 0..100 {
        let inst = random_instance(&mut r);
        match rho_check(&inst.a, &inst.m, &inst.n, &tol()) {
            Ok(c) => {
                checked += 1;
                let gap = c.lower_left.max(c.upper_right);
                worst = worst.max(gap);
                if gap > 1e-9 {
                    failures += 1;
                }
            }
            Err(WmpError::NonExistent { .. }) => {
                // Existence must agree between A and rho(A).
                let (rho, t) = rho_embed(&inst.a, &inst.m, &inst.n).unwrap();
                let direct = wmp_exists(&inst.a, &inst.m, &inst.n, &tol()).unwrap().exists;
                let embedded = wmp_exists(&rho, &t, &t.inverse_weight(), &tol()).unwrap().exists;
                if direct != embedded {
                    failures += 1;
                }
            }
            Err(e) => panic!("{e}"),
        }
    }
    outcome(
        failures == 0 && checked > 0,
        format!("{checked} existing instances, worst block gap {worst:.2e}, {failures} failures"),
    )
}

const GRID: [usize; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 1000];

fn sequence(base: &Problem, step: impl Fn(f64) -> Matrix) -> PerturbationSequence {
    let terms = GRID
        .iter()
        .map(|&n| Problem {
            a: &base.a + step(1.0 / n as f64),
            m: base.m.clone(),
            n: base.n.clone(),
        })
        .collect();
    PerturbationSequence::new(base.clone(), GRID.to_vec(), terms, SequenceKind::Full).unwrap()
}

fn continuity_suite() -> Outcome {
    let mut r = rng(10);
    let a = random::with_rank(6, 5, 3, &mut r);
    let m = random::weight_matrix(6, 0.3, &mut r);
    let n = random::weight_matrix(5, 0.3, &mut r);
    let base = Problem { a: a.clone(), m, n };
    let p = projector_corange(&a, &tol());
    let q = linalg::projector_range(&a, &tol());
    let e = random::gaussian(6, 5, &mut r);
    let f = random::gaussian(6, 5, &mut r);
    let keep = &q * &e * &p;
    let drop = (Matrix::identity(6) - &q) * &f * (Matrix::identity(5) - &p);

    let d = run_diagnostics(&sequence(&base, |s| keep.scale(s)), &tol()).unwrap();
    let n_last = *GRID.last().unwrap() as f64;
    let mut scaling_ok = true;
    for c in Column::CONVERGENCE {
        let col = d.column(c);
        let (head, last) = col.split_at(col.len() - 1);
        let bound = head.iter().fold(0.0f64, |m, &(n, v)| m.max(n as f64 * v));
        if last[0].1 * n_last > 2.0 * bound + 1e-6 {
            scaling_ok = false;
        }
    }
    let converges = d.converges() && d.bounded() && d.rows.iter().all(|r| r.exists) && scaling_ok;
    let final_wmp = d.rows.last().and_then(|r| r.wmp_diff).unwrap_or(f64::NAN);

    let dd = run_diagnostics(&sequence(&base, |s| drop.scale(s)), &tol()).unwrap();
    let growth = dd.tail_growth(Column::MpNorm);
    let diverges = dd.trend(Column::MpNorm) == Trend::Diverging && growth >= 10.0;
    let window: Vec<usize> = GRID[GRID.len() - tail_window(GRID.len())..].to_vec();
    outcome(
        converges && diverges,
        format!(
            "rank-preserving: converges={converges}, final wmp gap {final_wmp:.2e}; \
             rank-dropping: ||A_n†|| grows {growth:.1}x over n in {window:?}"
        ),
    )
}

fn criteria_agreement_suite() -> Outcome {
    let mut r = rng(11);
    let (mut verdicts, mut borderline, mut failures) = (0, 0, 0);
    for i in 0..500 {
        let n = r.random_range(2..=6);
        let ra = r.random_range(1..n);
        let a = random::with_rank(ra, n, ra, &mut r);
        // Cycle through general position, shared directions and near misses.
        let b = match i % 3 {
            0 => random::with_rank(r.random_range(1..=n), n, r.random_range(1..=n), &mut r),
            1 => {
                let shared = random::gaussian(1, ra, &mut r) * &a;
                Matrix::vstack(&shared, &random::gaussian(1, n, &mut r)).unwrap()
            }
            _ => {
                let eps = 10f64.powf(r.random_range(-9.0..-1.0));
                let row = random::gaussian(1, ra, &mut r) * &a;
                &row + random::gaussian(1, n, &mut r).scale(eps * operator_norm(&row))
            }
        };
        match separated_pair_check(&a, &b, &tol()) {
            Ok(rep) => {
                verdicts += 1;
                let by_norm = rep.pq_norm <= 1.0 - SEPARATION_MARGIN;
                let by_cond = rep.two_minus_sum_cond <= tol().inv_cond_max;
                let consistent_dims = rep.is_separated == (rep.intersection_dim == 0);
                if by_norm != rep.is_separated || by_cond != rep.is_separated || !consistent_dims {
                    failures += 1;
                }
            }
            Err(WmpError::CriteriaDisagree { pq_norm, .. }) => {
                borderline += 1;
                if !(pq_norm > 1.0 - SEPARATION_MARGIN && pq_norm <= 1.0 + 1e-12) {
                    failures += 1;
                }
            }
            Err(e) => panic!("{e}"),
        }
    }
    outcome(
        failures == 0,
        format!("{verdicts} verdicts, {borderline} borderline refusals, {failures} inconsistencies"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("worked example", worked_example),
        ("weighted Penrose suite", penrose_suite),
        ("positive reduction", reduction_suite),
        ("positive-weight oracle", oracle_suite),
        ("t -> 0 limit", key_limit_suite),
        ("lambda -> inf limit", lambda_suite),
        ("separated closed form", separated_suite),
        ("B decomposition", decomposition_suite),
        ("rho embedding", rho_suite),
        ("continuity harness", continuity_suite),
        ("separated criteria agreement", criteria_agreement_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
