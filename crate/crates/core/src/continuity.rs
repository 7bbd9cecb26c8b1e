//! Finite-prefix diagnostics for the continuity of `A†_{MN}` along a
//! sequence `(A_n, M_n, N_n) -> (A, M, N)`.
//!
//! For every term the harness records the six quantities whose joint
//! behaviour characterizes continuity: `||(A_n)†_{M_nN_n} - A†_{MN}||`,
//! `||(A_n)†_{M_nN_n}||`, `||A_n†||`, `||A_n†A_n - A†A||`,
//! `||A_nA_n† - AA†||` and `||A_n† - A†||`. Limits and suprema are only
//! estimated from the computed prefix, using the last quarter of the terms.

use crate::error::{Result, WmpError};
use crate::linalg::operator_norm;
use crate::matrix::Matrix;
use crate::schedule;
use crate::tolerance::ToleranceConfig;
use crate::weight::Weight;
use crate::wmp::{self, wmp_inverse, MpParts};

/// Growth factor over the tail window at which a column counts as diverging.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

/// One problem `(A, M, N)`. Weights are kept as raw Hermitian matrices
/// because terms of a sequence need not be invertible.
#[derive(Debug, Clone)]
pub struct Problem {
    pub a: Matrix,
    pub m: Matrix,
    pub n: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Full,
    WeightsOnly,
}

#[derive(Debug, Clone)]
pub struct PerturbationSequence {
    pub base: Problem,
    /// Sequence index `n` of each term.
    pub index: Vec<usize>,
    pub terms: Vec<Problem>,
    pub kind: SequenceKind,
}

impl PerturbationSequence {
    pub fn new(base: Problem, index: Vec<usize>, terms: Vec<Problem>, kind: SequenceKind) -> Result<Self> {
        if index.len() != terms.len() {
            return Err(WmpError::InvalidArgument(format!(
                "{} indices for {} terms",
                index.len(),
                terms.len()
            )));
        }
        for t in &terms {
            if t.a.shape() != base.a.shape() || t.m.shape() != base.m.shape() || t.n.shape() != base.n.shape() {
                return Err(WmpError::dims("PerturbationSequence", "term shape differs from the base"));
            }
            if kind == SequenceKind::WeightsOnly && t.a != base.a {
                return Err(WmpError::InvalidArgument(
                    "weights-only sequence must keep A fixed".into(),
                ));
            }
        }
        Ok(PerturbationSequence {
            base,
            index,
            terms,
            kind,
        })
    }

    /// `(A, M_n, N_n)` for the given weight sequences.
    pub fn weights_only(base: Problem, index: Vec<usize>, m_seq: Vec<Matrix>, n_seq: Vec<Matrix>) -> Result<Self> {
        if m_seq.len() != n_seq.len() {
            return Err(WmpError::InvalidArgument("M_n and N_n sequences differ in length".into()));
        }
        let terms = m_seq
            .into_iter()
            .zip(n_seq)
            .map(|(m, n)| Problem {
                a: base.a.clone(),
                m,
                n,
            })
            .collect();
        Self::new(base, index, terms, SequenceKind::WeightsOnly)
    }
}

#[derive(Debug, Clone)]
pub struct ContinuityRow {
    pub n: usize,
    /// Whether `(A_n)†_{M_nN_n}` exists (weights invertible and both
    /// factors invertible).
    pub exists: bool,
    /// `||(A_n)†_{M_nN_n} - A†_{MN}||`.
    pub wmp_diff: Option<f64>,
    /// `||(A_n)†_{M_nN_n}||`.
    pub wmp_norm: Option<f64>,
    /// `||R^-1|| ||A_n†|| ||L^-1||`.
    pub norm_bound: Option<f64>,
    /// `||A_n†||`.
    pub mp_norm: f64,
    /// `||A_n†A_n - A†A||`.
    pub corange_diff: f64,
    /// `||A_nA_n† - AA†||`.
    pub range_diff: f64,
    /// `||A_n† - A†||`.
    pub mp_diff: f64,
    /// `max(||A_n - A||, ||M_n - M||, ||N_n - N||)`.
    pub input_diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    WmpDiff,
    WmpNorm,
    MpNorm,
    CorangeDiff,
    RangeDiff,
    MpDiff,
}

impl Column {
    pub const ALL: [Column; 6] = [
        Column::WmpDiff,
        Column::WmpNorm,
        Column::MpNorm,
        Column::CorangeDiff,
        Column::RangeDiff,
        Column::MpDiff,
    ];
    pub const CONVERGENCE: [Column; 4] = [Column::WmpDiff, Column::CorangeDiff, Column::RangeDiff, Column::MpDiff];
    pub const BOUNDEDNESS: [Column; 2] = [Column::WmpNorm, Column::MpNorm];

    pub fn name(self) -> &'static str {
        match self {
            Column::WmpDiff => "wmp_diff",
            Column::WmpNorm => "wmp_norm",
            Column::MpNorm => "mp_norm",
            Column::CorangeDiff => "corange_diff",
            Column::RangeDiff => "range_diff",
            Column::MpDiff => "mp_diff",
        }
    }

    pub fn value(self, row: &ContinuityRow) -> Option<f64> {
        match self {
            Column::WmpDiff => row.wmp_diff,
            Column::WmpNorm => row.wmp_norm,
            Column::MpNorm => Some(row.mp_norm),
            Column::CorangeDiff => Some(row.corange_diff),
            Column::RangeDiff => Some(row.range_diff),
            Column::MpDiff => Some(row.mp_diff),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Decreasing,
    Bounded,
    Diverging,
}

#[derive(Debug, Clone)]
pub struct ContinuityDiagnostics {
    pub rows: Vec<ContinuityRow>,
    /// Number of trailing rows used for trend classification.
    pub tail_window: usize,
    /// Changes below this are treated as noise.
    pub floor: f64,
    /// First index from which every term's weighted inverse exists.
    pub n0: Option<usize>,
}

impl ContinuityDiagnostics {
    /// Values of a column over the rows where it is defined, with their `n`.
    pub fn column(&self, c: Column) -> Vec<(usize, f64)> {
        self.rows.iter().filter_map(|r| c.value(r).map(|v| (r.n, v))).collect()
    }

    fn tail(&self, c: Column) -> Vec<(usize, f64)> {
        let start = self.rows.len().saturating_sub(self.tail_window);
        self.rows[start..]
            .iter()
            .filter_map(|r| c.value(r).map(|v| (r.n, v)))
            .collect()
    }

    /// Tail-window values of a column.
    pub fn tail_values(&self, c: Column) -> Vec<f64> {
        self.tail(c).into_iter().map(|(_, v)| v).collect()
    }

    /// `Diverging` if the last tail value is at least [`DIVERGENCE_GROWTH`]
    /// times the first, `Decreasing` if the window never rises above the
    /// noise floor, `Bounded` otherwise.
    pub fn trend(&self, c: Column) -> Trend {
        let vals = self.tail_values(c);
        let (Some(&first), Some(&last)) = (vals.first(), vals.last()) else {
            return Trend::Bounded;
        };
        if last >= DIVERGENCE_GROWTH * first.max(self.floor) {
            Trend::Diverging
        } else if schedule::nonincreasing_above_floor(&vals, self.floor) {
            Trend::Decreasing
        } else {
            Trend::Bounded
        }
    }

    /// Growth `last / first` of a column over the tail window.
    pub fn tail_growth(&self, c: Column) -> f64 {
        let vals = self.tail_values(c);
        match (vals.first(), vals.last()) {
            (Some(&f), Some(&l)) if f > 0.0 => l / f,
            (Some(_), Some(&l)) if l > 0.0 => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// Largest value of `n · column(n)` over the tail window.
    pub fn tail_scaled_max(&self, c: Column) -> f64 {
        self.tail(c).iter().fold(0.0, |m, &(n, v)| m.max(n as f64 * v))
    }

    /// All convergence columns decrease over the tail (or sit at the floor).
    pub fn converges(&self) -> bool {
        Column::CONVERGENCE.iter().all(|&c| self.trend(c) == Trend::Decreasing)
    }

    /// No boundedness column diverges over the tail.
    pub fn bounded(&self) -> bool {
        Column::BOUNDEDNESS.iter().all(|&c| self.trend(c) != Trend::Diverging)
    }

    /// Finite-prefix proxy for the equivalence of the six conditions: the
    /// boundedness verdict and the convergence verdict agree.
    pub fn conditions_agree(&self) -> bool {
        self.converges() == self.bounded()
    }

    /// Rows whose weighted inverse exists, checked against the
    /// submultiplicative bound `||R^-1|| ||A_n†|| ||L^-1||`.
    pub fn norm_bound_holds(&self, slack: f64) -> bool {
        self.rows.iter().all(|r| match (r.wmp_norm, r.norm_bound) {
            (Some(v), Some(b)) => v <= b * (1.0 + slack) + slack,
            _ => true,
        })
    }
}

/// Tail window: the last quarter of the terms, at least two.
pub fn tail_window(terms: usize) -> usize {
    terms.div_ceil(4).max(2).min(terms)
}

struct Base {
    parts: MpParts,
    wmp: Matrix,
    m: Matrix,
    n: Matrix,
    a: Matrix,
}

fn base(p: &Problem, tol: &ToleranceConfig) -> Result<Base> {
    let m = Weight::new(p.m.clone(), tol)?;
    let n = Weight::new(p.n.clone(), tol)?;
    let wmp = wmp_inverse(&p.a, &m, &n, tol)?.inverse;
    Ok(Base {
        parts: MpParts::new(&p.a, tol),
        wmp,
        m: m.matrix().clone(),
        n: n.matrix().clone(),
        a: p.a.clone(),
    })
}

fn weighted_term(p: &Problem, tol: &ToleranceConfig) -> Result<Option<wmp::WmpResult>> {
    let attempt = || -> Result<wmp::WmpResult> {
        let m = Weight::new(p.m.clone(), tol)?;
        let n = Weight::new(p.n.clone(), tol)?;
        wmp_inverse(&p.a, &m, &n, tol)
    };
    match attempt() {
        Ok(r) => Ok(Some(r)),
        Err(e) if e.is_mathematical() => Ok(None),
        Err(e) => Err(e),
    }
}

fn row(n: usize, p: &Problem, b: &Base, tol: &ToleranceConfig) -> Result<ContinuityRow> {
    let parts = MpParts::new(&p.a, tol);
    let w = weighted_term(p, tol)?;
    let input_diff = operator_norm(&(&p.a - &b.a))
        .max(operator_norm(&(&p.m - &b.m)))
        .max(operator_norm(&(&p.n - &b.n)));
    Ok(ContinuityRow {
        n,
        exists: w.is_some(),
        wmp_diff: w.as_ref().map(|r| operator_norm(&(&r.inverse - &b.wmp))),
        wmp_norm: w.as_ref().map(|r| operator_norm(&r.inverse)),
        norm_bound: w.as_ref().map(|r| r.norm_bound()),
        mp_norm: operator_norm(&parts.mp),
        corange_diff: operator_norm(&(&parts.p_corange - &b.parts.p_corange)),
        range_diff: operator_norm(&(&parts.p_range - &b.parts.p_range)),
        mp_diff: operator_norm(&(&parts.mp - &b.parts.mp)),
        input_diff,
    })
}

/// First sequence index from which every remaining term exists.
fn first_stable_index(rows: &[ContinuityRow]) -> Option<usize> {
    let last_missing = rows.iter().rposition(|r| !r.exists);
    match last_missing {
        None => rows.first().map(|r| r.n),
        Some(i) => rows.get(i + 1).map(|r| r.n),
    }
}

/// Computes the six continuity columns for every term. Terms whose
/// weighted inverse does not exist are recorded with `exists = false`.
pub fn run_diagnostics(seq: &PerturbationSequence, tol: &ToleranceConfig) -> Result<ContinuityDiagnostics> {
    let b = base(&seq.base, tol)?;
    let rows = seq
        .index
        .iter()
        .zip(&seq.terms)
        .map(|(&n, p)| row(n, p, &b, tol))
        .collect::<Result<Vec<_>>>()?;
    let floor = tol.verify_atol * (1.0 + operator_norm(&b.wmp));
    Ok(ContinuityDiagnostics {
        n0: first_stable_index(&rows),
        tail_window: tail_window(rows.len()),
        rows,
        floor,
    })
}

/// Diagnostics for `(A, M_n, N_n)`; `n0` is the first index from which
/// `M_n`, `N_n`, `R_{A,N_n}` and `L_{A,M_n^-1}` are all invertible.
pub fn perturb_weights_only(
    a: &Matrix,
    m: &Weight,
    n: &Weight,
    index: Vec<usize>,
    m_seq: Vec<Matrix>,
    n_seq: Vec<Matrix>,
    tol: &ToleranceConfig,
) -> Result<ContinuityDiagnostics> {
    let base_problem = Problem {
        a: a.clone(),
        m: m.matrix().clone(),
        n: n.matrix().clone(),
    };
    let seq = PerturbationSequence::weights_only(base_problem, index, m_seq, n_seq)?;
    run_diagnostics(&seq, tol)
}
