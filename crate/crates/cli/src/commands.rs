//! Subcommand adapters. Each one reads its roles, calls the library once
//! and records the result in a [`Report`].

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wmp_core::continuity::{tail_window, Column};
use wmp_core::linalg::{self, projector_corange};
use wmp_core::{
    closed_form_separated, equivalent_domain_weights, general_limit_via_decomposition, limit_lambda_to_inf,
    limit_t_to_zero, matched_projection, omega_weight, operator_norm, positive_reduction, random, rho_check,
    rho_embed, run_diagnostics, schedule, separated_pair_check, verify_weighted_penrose, wmp_exists, wmp_inverse,
    EquivalentWeights, LimitTrace, Matrix, PerturbationSequence, Problem, SequenceKind, ToleranceConfig, Weight,
    WmpError,
};

use crate::bundle::Term;
use crate::error::{CliError, Result};
use crate::report::{Cell, Report, Table};

/// Index grid for generated perturbation sequences.
pub const PERTURB_GRID: [usize; 9] = [1, 2, 4, 8, 16, 32, 64, 128, 1000];

/// Rows at the end of a limit trace checked for monotone error.
const MONOTONE_TAIL: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PerturbMode {
    /// `A_n = A + Q E P / n`, keeping the rank of `A`.
    RankPreserving,
    /// `A_n = A + (I - Q) F (I - P) / n`, raising the rank of every term.
    RankDropping,
    /// `A` fixed, `M_n = M + H_M / n`, `N_n = N + H_N / n` with Hermitian `H`.
    WeightsOnly,
}

/// Everything a subcommand can read.
pub struct Inputs {
    pub matrices: BTreeMap<String, Matrix>,
    pub tol: ToleranceConfig,
    pub schedule: Option<Vec<f64>>,
    pub terms: Option<Vec<Term>>,
    pub seed: u64,
}

impl Inputs {
    pub fn role(&self, name: &str) -> Result<&Matrix> {
        self.matrices.get(name).ok_or_else(|| CliError::MissingRole(name.into()))
    }

    fn weight(&self, name: &str) -> Result<Weight> {
        Ok(Weight::new(self.role(name)?.clone(), &self.tol)?)
    }

    fn weight_or_identity(&self, name: &str, dim: usize) -> Result<Weight> {
        match self.matrices.get(name) {
            Some(m) => Ok(Weight::new(m.clone(), &self.tol)?),
            None => Ok(Weight::identity(dim)),
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn schedule_or(&self, default: Vec<f64>) -> Vec<f64> {
        self.schedule.clone().unwrap_or(default)
    }
}

fn amn(inp: &Inputs) -> Result<(&Matrix, Weight, Weight)> {
    Ok((inp.role("A")?, inp.weight("M")?, inp.weight("N")?))
}

pub fn wmp(inp: &Inputs) -> Result<Report> {
    let (a, m, n) = amn(inp)?;
    let res = wmp_inverse(a, &m, &n, &inp.tol)?;
    let mut r = Report::new("wmp");
    r.matrix("X", &res.inverse)
        .matrix("A_pinv", &res.mp)
        .matrix("R_AN", &res.r_factor)
        .matrix("L_AMinv", &res.l_factor)
        .num("cond_R_AN", res.r_cond)
        .num("cond_L_AMinv", res.l_cond)
        .num("residual_AXA", res.penrose.axa)
        .num("residual_XAX", res.penrose.xax)
        .num("residual_MAX", res.penrose.max_sym)
        .num("residual_NXA", res.penrose.nxa_sym)
        .flag("certified", res.certified(&inp.tol))
        .num("norm_X", operator_norm(&res.inverse))
        .num("norm_bound", res.norm_bound());
    Ok(r)
}

pub fn exists(inp: &Inputs) -> Result<Report> {
    let (a, m, n) = amn(inp)?;
    let rep = wmp_exists(a, &m, &n, &inp.tol)?;
    let mut r = Report::new("exists");
    r.flag("exists", rep.exists)
        .flag("R_AN_invertible", rep.r_invertible)
        .flag("L_AMinv_invertible", rep.l_invertible)
        .num("cond_R_AN", rep.r_cond)
        .num("cond_L_AMinv", rep.l_cond);
    if let Some(factor) = rep.failing_factor() {
        r.fail(
            WmpError::NonExistent {
                factor,
                r_cond: rep.r_cond,
                l_cond: rep.l_cond,
            }
            .to_string(),
        );
    }
    Ok(r)
}

pub fn reduce(inp: &Inputs, samples: usize) -> Result<Report> {
    let (a, m, n) = amn(inp)?;
    let red = positive_reduction(a, &m, &n, &inp.tol)?;
    let mut r = Report::new("reduce");
    r.matrix("X", &red.original)
        .matrix("S_AM", red.s.matrix())
        .matrix("T_AN", red.t.matrix())
        .matrix("X_reduced", &red.reduced)
        .flag("S_positive_definite", red.s.is_positive_definite())
        .flag("T_positive_definite", red.t.is_positive_definite())
        .num("agreement", red.agreement);
    if samples == 0 {
        return Ok(r);
    }
    let reference = wmp_inverse(a, &Weight::identity(a.rows()), &n, &inp.tol)?.inverse;
    match equivalent_domain_weights(a, &n, samples, &mut inp.rng(), &inp.tol)? {
        EquivalentWeights::Degenerate { rank, dim } => {
            r.text(
                "equivalent_weights",
                format!("none to sample: rank {rank} of {dim}, A†A is 0 or I"),
            );
        }
        EquivalentWeights::Samples(weights) => {
            let rows = weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let x = wmp_inverse(a, &Weight::identity(a.rows()), w, &inp.tol)?.inverse;
                    Ok(vec![
                        Cell::Int(i),
                        Cell::Bool(w.is_positive_definite()),
                        Cell::Num(operator_norm(&(&x - &reference))),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            r.table(
                "equivalent_weights",
                Table {
                    columns: vec!["sample".into(), "positive_definite".into(), "gap_to_A_IN".into()],
                    rows,
                },
            );
        }
    }
    Ok(r)
}

fn trace_table(trace: &LimitTrace, param: &str) -> Table {
    Table {
        columns: vec![param.into(), "error".into(), "observed_rank".into()],
        rows: trace
            .rows
            .iter()
            .map(|row| vec![Cell::Num(row.param), Cell::Num(row.error), Cell::Int(row.observed_rank)])
            .collect(),
    }
}

fn trace_report(r: &mut Report, trace: &LimitTrace, param: &str, tol: &ToleranceConfig) {
    let floor = trace.noise_floor(tol);
    r.matrix("target", &trace.target);
    if let Some(last) = trace.rows.last() {
        r.matrix("last_iterate", &last.iterate);
    }
    r.table("trace", trace_table(trace, param))
        .num("final_error", trace.final_error())
        .num("limit_atol", trace.limit_atol)
        .flag("converged", trace.converged)
        .flag("error_nonincreasing", schedule::nonincreasing_above_floor(&trace.errors(), floor))
        .flag("tail_nonincreasing", trace.tail_nonincreasing(MONOTONE_TAIL, floor))
        .int("pinned_rank", trace.pinned_rank)
        .flag("rank_changed", trace.rank_changed());
}

pub fn limit_t0(inp: &Inputs) -> Result<Report> {
    let (a, b) = (inp.role("A")?, inp.role("B")?);
    let (v, w) = (inp.weight("V")?, inp.weight("W")?);
    let x = inp.matrices.get("X").unwrap_or(v.matrix());
    let omega = omega_weight(a, b, &w, Some(x), inp.matrices.get("Y"), &inp.tol)?;
    let sched = inp.schedule_or(schedule::default_t_schedule());
    let trace = limit_t_to_zero(a, b, &v, &w, &omega, &sched, &inp.tol)?;
    let mut r = Report::new("limit-t0");
    r.matrix("U", omega.u.matrix());
    trace_report(&mut r, &trace, "t", &inp.tol);
    Ok(r)
}

pub fn limit_lambda(inp: &Inputs) -> Result<Report> {
    let (a, b) = (inp.role("A")?, inp.role("B")?);
    let sched = inp.schedule_or(schedule::default_lambda_schedule());
    let trace = limit_lambda_to_inf(a, b, &sched, &inp.tol)?;
    let mut r = Report::new("limit-lambda");
    trace_report(&mut r, &trace, "lambda", &inp.tol);
    Ok(r)
}

pub fn separated(inp: &Inputs) -> Result<Report> {
    let rep = separated_pair_check(inp.role("A")?, inp.role("B")?, &inp.tol)?;
    let mut r = Report::new("separated");
    r.flag("separated", rep.is_separated)
        .num("norm_PQ", rep.pq_norm)
        .num("cond_2I_minus_P_minus_Q", rep.two_minus_sum_cond)
        .int("intersection_dim", rep.intersection_dim)
        .int("sum_rank", rep.sum_rank);
    if !rep.is_separated {
        r.fail(
            WmpError::NotSeparated {
                pq_norm: rep.pq_norm,
                cond: rep.two_minus_sum_cond,
            }
            .to_string(),
        );
    }
    Ok(r)
}

pub fn closed_form(inp: &Inputs) -> Result<Report> {
    let (a, b) = (inp.role("A")?, inp.role("B")?);
    let (v, w) = (inp.weight("V")?, inp.weight("W")?);
    let w_prime = inp.weight_or_identity("Wprime", w.dim())?;
    let cf = closed_form_separated(a, b, &v, &w, &w_prime, &inp.tol)?;
    let mut r = Report::new("closed-form");
    r.matrix("D", &cf.d)
        .matrix("Pi", &cf.pi)
        .matrix("direct", &cf.direct)
        .num("residual", cf.residual)
        .num("Wprime_residual", cf.w_prime_residual)
        .num("norm_PQ", cf.report.pq_norm);
    Ok(r)
}

pub fn decompose(inp: &Inputs) -> Result<Report> {
    let (a, b) = (inp.role("A")?, inp.role("B")?);
    let (v, w) = (inp.weight("V")?, inp.weight("W")?);
    let w_prime = inp.weight_or_identity("Wprime", w.dim())?;
    let sched = inp.schedule_or(schedule::default_t_schedule());
    let g = general_limit_via_decomposition(a, b, &v, &w, &w_prime, &sched, &inp.tol)?;
    let d = &g.decomposition;
    let mut r = Report::new("decompose");
    r.matrix("B1", &d.b1)
        .matrix("B2", &d.b2)
        .num("orthogonality", d.orthogonality)
        .num("range_defect", d.range_defect)
        .int("B2_rank", d.b2_rank)
        .flag("separated", d.separation.is_separated)
        .num("norm_PQ2", d.separation.pq_norm)
        .matrix("Pi_prime", &g.pi_prime)
        .matrix("closed_form", &g.closed_form)
        .matrix("limit", &g.limit)
        .num("limit_residual", g.limit_residual)
        .num("Wprime_residual", g.w_prime_residual)
        .num("Z_residual", g.z_residual)
        .table("trace", trace_table(&g.trace, "t"))
        .num("final_error", g.trace.final_error());
    Ok(r)
}

pub fn verify(inp: &Inputs) -> Result<Report> {
    let (a, m, n) = amn(inp)?;
    let x = inp.role("X")?;
    let res = verify_weighted_penrose(a, &m, &n, x)?;
    let mut r = Report::new("verify");
    r.num("residual_AXA", res.axa)
        .num("residual_XAX", res.xax)
        .num("residual_MAX", res.max_sym)
        .num("residual_NXA", res.nxa_sym)
        .num("threshold", inp.tol.verify_atol);
    let ok = res.all_below(inp.tol.verify_atol);
    r.flag("satisfied", ok);
    if !ok {
        r.fail(format!(
            "X is not A†_MN: largest residual {:.3e} exceeds verify_atol {:.3e}",
            res.max(),
            inp.tol.verify_atol
        ));
    }
    Ok(r)
}

fn hermitian_noise(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    random::gaussian(n, n, rng).hermitian_part()
}

fn generated_sequence(base: &Problem, mode: PerturbMode, inp: &Inputs) -> Result<PerturbationSequence> {
    let mut rng = inp.rng();
    let (k, h) = base.a.shape();
    let scaled = |step: &Matrix, n: usize| step.scale(1.0 / n as f64);
    let grid = PERTURB_GRID.to_vec();
    let seq = match mode {
        PerturbMode::RankPreserving | PerturbMode::RankDropping => {
            let p = projector_corange(&base.a, &inp.tol);
            let q = linalg::projector_range(&base.a, &inp.tol);
            let e = random::gaussian(k, h, &mut rng);
            let step = if mode == PerturbMode::RankPreserving {
                &q * e * &p
            } else {
                (Matrix::identity(k) - q) * e * (Matrix::identity(h) - p)
            };
            let terms = grid
                .iter()
                .map(|&n| Problem {
                    a: &base.a + scaled(&step, n),
                    m: base.m.clone(),
                    n: base.n.clone(),
                })
                .collect();
            PerturbationSequence::new(base.clone(), grid, terms, SequenceKind::Full)?
        }
        PerturbMode::WeightsOnly => {
            let hm = hermitian_noise(k, &mut rng);
            let hn = hermitian_noise(h, &mut rng);
            let m_seq = grid.iter().map(|&n| &base.m + scaled(&hm, n)).collect();
            let n_seq = grid.iter().map(|&n| &base.n + scaled(&hn, n)).collect();
            PerturbationSequence::weights_only(base.clone(), grid, m_seq, n_seq)?
        }
    };
    Ok(seq)
}

fn explicit_sequence(base: &Problem, terms: &[Term]) -> Result<PerturbationSequence> {
    let mut problems = Vec::with_capacity(terms.len());
    for t in terms {
        if let Some(extra) = t.roles.keys().find(|k| !["A", "M", "N"].contains(&k.as_str())) {
            return Err(CliError::Input(format!("term n={}: unexpected role `{extra}`", t.n)));
        }
        let pick = |name: &str, fallback: &Matrix| t.roles.get(name).unwrap_or(fallback).clone();
        problems.push(Problem {
            a: pick("A", &base.a),
            m: pick("M", &base.m),
            n: pick("N", &base.n),
        });
    }
    let kind = if problems.iter().all(|p| p.a == base.a) {
        SequenceKind::WeightsOnly
    } else {
        SequenceKind::Full
    };
    let index = terms.iter().map(|t| t.n).collect();
    Ok(PerturbationSequence::new(base.clone(), index, problems, kind)?)
}

pub fn perturb(inp: &Inputs, mode: Option<PerturbMode>) -> Result<Report> {
    let base = Problem {
        a: inp.role("A")?.clone(),
        m: inp.role("M")?.clone(),
        n: inp.role("N")?.clone(),
    };
    let seq = match (mode, &inp.terms) {
        (Some(_), Some(_)) => {
            return Err(CliError::Input("give either --mode or bundle terms, not both".into()));
        }
        (Some(mode), None) => generated_sequence(&base, mode, inp)?,
        (None, Some(terms)) => explicit_sequence(&base, terms)?,
        (None, None) => {
            return Err(CliError::Input(
                "perturb needs --mode or a `terms` list in the bundle".into(),
            ));
        }
    };
    let d = run_diagnostics(&seq, &inp.tol)?;

    let opt = |v: Option<f64>| v.map_or(Cell::Missing, Cell::Num);
    let rows = d
        .rows
        .iter()
        .map(|row| {
            vec![
                Cell::Int(row.n),
                Cell::Bool(row.exists),
                opt(row.wmp_diff),
                opt(row.wmp_norm),
                opt(row.norm_bound),
                Cell::Num(row.mp_norm),
                Cell::Num(row.corange_diff),
                Cell::Num(row.range_diff),
                Cell::Num(row.mp_diff),
                Cell::Num(row.input_diff),
            ]
        })
        .collect();
    let columns = [
        "n",
        "exists",
        "wmp_diff",
        "wmp_norm",
        "norm_bound",
        "mp_norm",
        "corange_diff",
        "range_diff",
        "mp_diff",
        "input_diff",
    ];
    let trends = Table {
        columns: vec!["column".into(), "trend".into(), "tail_growth".into()],
        rows: Column::ALL
            .iter()
            .map(|&c| {
                let trend = format!("{:?}", d.trend(c)).to_lowercase();
                vec![Cell::Text(c.name().into()), Cell::Text(trend), Cell::Num(d.tail_growth(c))]
            })
            .collect(),
    };

    let mut r = Report::new("perturb");
    r.table(
        "diagnostics",
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
        },
    );
    match d.n0 {
        Some(n0) => r.int("n0", n0),
        None => r.text("n0", "none"),
    };
    r.int("tail_window", tail_window(d.rows.len()))
        .num("noise_floor", d.floor)
        .table("trends", trends)
        .flag("converges", d.converges())
        .flag("bounded", d.bounded())
        .flag("conditions_agree", d.conditions_agree())
        .flag("norm_bound_holds", d.norm_bound_holds(inp.tol.verify_rtol));
    Ok(r)
}

pub fn matched(inp: &Inputs) -> Result<Report> {
    let q = inp.role("Q")?;
    let p = matched_projection(q, &inp.tol)?;
    let mut r = Report::new("matched-projection");
    r.matrix("P", &p)
        .num("idempotence", operator_norm(&(&p * &p - &p)))
        .num("hermitian_defect", linalg::hermitian_defect(&p))
        .int("rank", linalg::projector_bases(&p).0.cols());
    Ok(r)
}

pub fn rho(inp: &Inputs) -> Result<Report> {
    let (a, m, n) = amn(inp)?;
    let (embedded, t) = rho_embed(a, &m, &n)?;
    let c = rho_check(a, &m, &n, &inp.tol)?;
    let mut r = Report::new("rho");
    r.matrix("rho_A", &embedded)
        .matrix("T", t.matrix())
        .matrix("rho_inverse", &c.embedded)
        .matrix("X", &c.direct)
        .num("lower_left_gap", c.lower_left)
        .num("upper_right_gap", c.upper_right)
        .num("diagonal_max", c.diagonal);
    Ok(r)
}
