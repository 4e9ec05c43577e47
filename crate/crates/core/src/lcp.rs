//! Linear complementarity core: Lemke's complementary pivoting with a
//! lexicographic ratio test, solution verification and copositivity
//! sampling.
//!
//! LCP(q, M): find w >= 0 with q + Mw >= 0 and w^T (q + Mw) = 0.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dense::Mat;

/// Zero tolerance for pivot elements.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LcpProblem {
    pub q: Vec<f64>,
    pub m: Mat,
}

impl LcpProblem {
    pub fn new(q: Vec<f64>, m: Mat) -> Result<Self, LcpError> {
        if m.nrows() != m.ncols() || m.nrows() != q.len() {
            return Err(LcpError::Dimensions {
                q: q.len(),
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(LcpProblem { q, m })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcpStatus {
    Solved,
    RayTermination,
    IterationLimit,
}

/// Tableau variable labels, used in pivot logs and ray reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableauVar {
    /// Slack of row `i` (the `q + Mw` side).
    Slack(usize),
    /// Decision component `w_i`.
    Decision(usize),
    /// Lemke's auxiliary variable.
    Aux,
}

impl fmt::Display for TableauVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableauVar::Slack(i) => write!(f, "v{i}"),
            TableauVar::Decision(i) => write!(f, "w{i}"),
            TableauVar::Aux => write!(f, "z0"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LcpSolution {
    pub status: LcpStatus,
    pub w: Vec<f64>,
    /// `q + M w` for the returned `w`.
    pub slack: Vec<f64>,
    pub pivots: usize,
    /// Entering/leaving pairs in pivot order.
    pub pivot_log: Vec<(TableauVar, TableauVar)>,
    /// Basis at ray termination, when that is how the run ended.
    pub ray_basis: Option<Vec<TableauVar>>,
}

#[derive(Debug, Error)]
pub enum LcpError {
    #[error("dimension mismatch: q has {q}, M is {rows}x{cols}")]
    Dimensions { q: usize, rows: usize, cols: usize },
    #[error("covering vector must be strictly positive")]
    BadCovering,
    #[error("max_pivots must be at least 1")]
    BadPivotLimit,
}

/// Residuals of a candidate solution.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    /// Worst violation of `w >= 0`.
    pub w_negativity: f64,
    /// Worst violation of `q + Mw >= 0`.
    pub slack_negativity: f64,
    /// `|w^T (q + Mw)|`.
    pub complementarity: f64,
    /// Infinity norm of `q`, for scaling the complementarity test.
    pub q_norm: f64,
}

impl ResidualReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.w_negativity <= tol
            && self.slack_negativity <= tol
            && self.complementarity <= tol * (1.0 + self.q_norm)
    }
}

/// Evaluates feasibility and complementarity residuals of `w`.
pub fn verify_solution(problem: &LcpProblem, w: &[f64]) -> ResidualReport {
    let slack_vec = slack_of(problem, w);
    let w_negativity = w.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
    let slack_negativity = slack_vec.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
    let complementarity = w
        .iter()
        .zip(&slack_vec)
        .map(|(&a, &b)| a * b)
        .sum::<f64>()
        .abs();
    let q_norm = problem.q.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    ResidualReport {
        w_negativity,
        slack_negativity,
        complementarity,
        q_norm,
    }
}

fn slack_of(problem: &LcpProblem, w: &[f64]) -> Vec<f64> {
    let mw = problem.m.matvec(w);
    problem
        .q
        .iter()
        .zip(&mw)
        .map(|(&qi, &mi)| qi + mi)
        .collect()
}

/// Minimum of `v^T M v` over `trials` seeded nonnegative unit vectors.
pub fn copositivity_sample(m: &Mat, trials: usize, seed: u64) -> f64 {
    assert_eq!(m.nrows(), m.ncols());
    let d = m.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for _ in 0..trials {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for a in v.iter_mut() {
            *a /= norm;
        }
        min = min.min(m.quad_form(&v));
    }
    min
}

struct LemkeTableau {
    d: usize,
    /// `d x (2d + 2)` rows: slack columns, decision columns, aux, rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<TableauVar>,
}

impl LemkeTableau {
    fn col_of(&self, var: TableauVar) -> usize {
        match var {
            TableauVar::Slack(i) => i,
            TableauVar::Decision(i) => self.d + i,
            TableauVar::Aux => 2 * self.d,
        }
    }

    fn rhs_col(&self) -> usize {
        2 * self.d + 1
    }

    fn pivot(&mut self, row: usize, entering: TableauVar) {
        let col = self.col_of(entering);
        let piv = self.rows[row][col];
        debug_assert!(piv.abs() > PIVOT_TOL);
        let inv = 1.0 / piv;
        for v in self.rows[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (dst, &src) in r.iter_mut().zip(&pivot_row) {
                    *dst -= factor * src;
                }
            }
        }
        self.basis[row] = entering;
    }

    /// Lexicographic minimum-ratio row for the entering column: compares
    /// `(rhs, slack columns) / pivot` vectors componentwise. Returns `None`
    /// when no positive pivot exists (a secondary ray).
    fn lex_min_ratio(&self, entering: TableauVar) -> Option<usize> {
        let col = self.col_of(entering);
        let rhs = self.rhs_col();
        let mut best: Option<usize> = None;
        for i in 0..self.d {
            let a = self.rows[i][col];
            if a <= PIVOT_TOL {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) => {
                    let bpiv = self.rows[b][col];
                    // Compare (rhs, binv columns)/pivot lexicographically.
                    let mut decided = false;
                    let ri = self.rows[i][rhs] / a;
                    let rb = self.rows[b][rhs] / bpiv;
                    if ne(ri, rb) {
                        if ri < rb {
                            best = Some(i);
                        }
                        decided = true;
                    }
                    if !decided {
                        for k in 0..self.d {
                            let ci = self.rows[i][k] / a;
                            let cb = self.rows[b][k] / bpiv;
                            if ne(ci, cb) {
                                if ci < cb {
                                    best = Some(i);
                                }
                                decided = true;
                                break;
                            }
                        }
                    }
                    // Identical ratio rows cannot occur with an invertible
                    // basis; keep the earlier row if they compare equal.
                    let _ = decided;
                }
            }
        }
        best
    }
}

fn ne(a: f64, b: f64) -> bool {
    (a - b).abs() > 1e-11 * (1.0 + a.abs().max(b.abs()))
}

fn complement(var: TableauVar) -> TableauVar {
    match var {
        TableauVar::Slack(i) => TableauVar::Decision(i),
        TableauVar::Decision(i) => TableauVar::Slack(i),
        TableauVar::Aux => TableauVar::Aux,
    }
}

/// Lemke's method with the given covering vector (all ones by default).
///
/// Deterministic: the lexicographic ratio test leaves no ties, so reruns
/// produce identical pivot sequences. Exhausting `max_pivots` yields the
/// `IterationLimit` status rather than an error.
pub fn lemke_solve(
    problem: &LcpProblem,
    covering: Option<&[f64]>,
    max_pivots: usize,
) -> Result<LcpSolution, LcpError> {
    let d = problem.dim();
    if max_pivots == 0 {
        return Err(LcpError::BadPivotLimit);
    }
    let ones;
    let cov: &[f64] = match covering {
        Some(c) => {
            if c.len() != d || c.iter().any(|&v| v <= 0.0) {
                return Err(LcpError::BadCovering);
            }
            c
        }
        None => {
            ones = vec![1.0; d];
            &ones
        }
    };

    // Trivial solution when q is already nonnegative.
    if problem.q.iter().all(|&v| v >= 0.0) {
        return Ok(LcpSolution {
            status: LcpStatus::Solved,
            w: vec![0.0; d],
            slack: problem.q.clone(),
            pivots: 0,
            pivot_log: Vec::new(),
            ray_basis: None,
        });
    }

    // Rows encode: slack_i - sum_j M_ij w_j - cov_i z0 = q_i.
    let width = 2 * d + 2;
    let mut rows = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = vec![0.0; width];
        row[i] = 1.0;
        for j in 0..d {
            row[d + j] = -problem.m.get(i, j);
        }
        row[2 * d] = -cov[i];
        row[2 * d + 1] = problem.q[i];
        rows.push(row);
    }
    let mut tab = LemkeTableau {
        d,
        rows,
        basis: (0..d).map(TableauVar::Slack).collect(),
    };

    // Initial pivot: the auxiliary variable enters; the most negative
    // q_i / cov_i row leaves (lexicographic among ties).
    let mut start = 0usize;
    for i in 1..d {
        let ri = problem.q[i] / cov[i];
        let rb = problem.q[start] / cov[start];
        if ri < rb - 1e-15 {
            start = i;
        } else if !ne(ri, rb) {
            for k in 0..d {
                let ci = tab.rows[i][k] / cov[i];
                let cb = tab.rows[start][k] / cov[start];
                if ne(ci, cb) {
                    if ci < cb {
                        start = i;
                    }
                    break;
                }
            }
        }
    }

    let mut pivot_log = Vec::new();
    let mut leaving = tab.basis[start];
    pivot_log.push((TableauVar::Aux, leaving));
    tab.pivot(start, TableauVar::Aux);
    let mut pivots = 1usize;

    loop {
        let entering = complement(leaving);
        match tab.lex_min_ratio(entering) {
            None => {
                return Ok(finish(
                    problem,
                    &tab,
                    LcpStatus::RayTermination,
                    pivots,
                    pivot_log,
                    true,
                ));
            }
            Some(row) => {
                leaving = tab.basis[row];
                pivot_log.push((entering, leaving));
                tab.pivot(row, entering);
                pivots += 1;
                if leaving == TableauVar::Aux {
                    return Ok(finish(
                        problem,
                        &tab,
                        LcpStatus::Solved,
                        pivots,
                        pivot_log,
                        false,
                    ));
                }
                if pivots >= max_pivots {
                    return Ok(finish(
                        problem,
                        &tab,
                        LcpStatus::IterationLimit,
                        pivots,
                        pivot_log,
                        false,
                    ));
                }
            }
        }
    }
}

fn finish(
    problem: &LcpProblem,
    tab: &LemkeTableau,
    status: LcpStatus,
    pivots: usize,
    pivot_log: Vec<(TableauVar, TableauVar)>,
    ray: bool,
) -> LcpSolution {
    let d = tab.d;
    let rhs = tab.rhs_col();
    let mut w = vec![0.0; d];
    for (i, &var) in tab.basis.iter().enumerate() {
        if let TableauVar::Decision(j) = var {
            w[j] = tab.rows[i][rhs].max(0.0);
        }
    }
    let slack = slack_of(problem, &w);
    LcpSolution {
        status,
        w,
        slack,
        pivots,
        pivot_log,
        ray_basis: ray.then(|| tab.basis.clone()),
    }
}

/// Writes `q`, `M` (row-major) and the pivot log to a debug file.
pub fn dump_problem(
    problem: &LcpProblem,
    solution: Option<&LcpSolution>,
    path: &Path,
) -> std::io::Result<()> {
    use std::fmt::Write as _;
    let d = problem.dim();
    let mut out = String::new();
    let _ = writeln!(out, "dim {d}");
    let _ = writeln!(
        out,
        "q {}",
        problem
            .q
            .iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    for i in 0..d {
        let _ = writeln!(
            out,
            "M {}",
            problem
                .m
                .row(i)
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    if let Some(sol) = solution {
        let _ = writeln!(out, "status {:?}", sol.status);
        let _ = writeln!(
            out,
            "w {}",
            sol.w
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(" ")
        );
        for (enter, leave) in &sol.pivot_log {
            let _ = writeln!(out, "pivot {enter} <- {leave}");
        }
        if let Some(basis) = &sol.ray_basis {
            let labels: Vec<String> = basis.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "ray_basis {}", labels.join(" "));
        }
    }
    std::fs::write(path, out)
}
