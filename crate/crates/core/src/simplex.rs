//! Bounded-variable primal simplex with two phases.
//!
//! Minimizes a linear objective over inequality rows plus box bounds. The
//! pricing rule is most-negative reduced cost with smallest-index
//! tie-breaks, falling back to Bland's smallest-index rule while the
//! iteration stalls on degenerate pivots, which keeps the method finite and
//! fully deterministic.

use thiserror::Error;

/// Comparison operator of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// A sparse constraint row `sum coeffs (cmp) rhs`.
#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// Linear program in minimization form with box bounds on variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// New program with zero objective and default bounds `[0, +inf)`.
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            objective: vec![0.0; n_vars],
            rows: Vec::new(),
            lower: vec![0.0; n_vars],
            upper: vec![f64::INFINITY; n_vars],
        }
    }

    pub fn add_row(&mut self, cmp: Cmp, rhs: f64, coeffs: Vec<(usize, f64)>) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.n_vars));
        self.rows.push(LpRow { coeffs, cmp, rhs });
    }
}

/// Solver outcome.
#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("objective/bounds dimensions do not match n_vars")]
    Dimensions,
    #[error("variable {0} has an invalid bound pair")]
    BadBounds(usize),
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("basis became numerically singular")]
    SingularBasis,
}

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-9;
const STALL_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

struct Core {
    m: usize,
    n_total: usize,
    n_structural: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
}

enum StepOutcome {
    Optimal,
    Unbounded,
    Progress,
}

impl Core {
    fn binv_row(&self, i: usize) -> &[f64] {
        &self.binv[i * self.m..(i + 1) * self.m]
    }

    /// Basic values from scratch: `x_B = B^-1 (b - N x_N)`.
    fn recompute_xb(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.n_total {
            let v = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower => self.lower[j],
                VarState::AtUpper => self.upper[j],
            };
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    r[i] -= a * v;
                }
            }
        }
        for i in 0..self.m {
            self.xb[i] = self
                .binv_row(i)
                .iter()
                .zip(&r)
                .map(|(&bi, &ri)| bi * ri)
                .sum();
        }
    }

    /// Rebuilds `B^-1` from the basis columns by Gauss-Jordan elimination.
    fn refactorize(&mut self) -> Result<(), SimplexError> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                b[i * m + r] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = b[col * m + col].abs();
            for r in col + 1..m {
                let v = b[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-12 {
                return Err(SimplexError::SingularBasis);
            }
            if piv != col {
                for k in 0..m {
                    b.swap(col * m + k, piv * m + k);
                    inv.swap(col * m + k, piv * m + k);
                }
            }
            let d = b[col * m + col];
            for k in 0..m {
                b[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r != col {
                    let f = b[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            b[r * m + k] -= f * b[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        Ok(())
    }

    fn reduced_cost(&self, pi: &[f64], j: usize) -> f64 {
        let mut d = self.cost[j];
        for &(i, a) in &self.cols[j] {
            d -= pi[i] * a;
        }
        d
    }

    fn step(&mut self, bland: bool) -> Result<StepOutcome, SimplexError> {
        // Duals for the current basis.
        let mut pi = vec![0.0; self.m];
        for k in 0..self.m {
            let mut v = 0.0;
            for r in 0..self.m {
                let c = self.cost[self.basis[r]];
                if c != 0.0 {
                    v += c * self.binv[r * self.m + k];
                }
            }
            pi[k] = v;
        }

        // Entering variable.
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..self.n_total {
            let improving = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower => {
                    if self.lower[j] >= self.upper[j] {
                        continue;
                    }
                    let d = self.reduced_cost(&pi, j);
                    if d < -COST_TOL {
                        Some(d)
                    } else {
                        None
                    }
                }
                VarState::AtUpper => {
                    let d = self.reduced_cost(&pi, j);
                    if d > COST_TOL {
                        Some(-d)
                    } else {
                        None
                    }
                }
            };
            if let Some(score) = improving {
                if bland {
                    entering = Some((j, score));
                    break;
                }
                match entering {
                    Some((_, best)) if score >= best => {}
                    _ => entering = Some((j, score)),
                }
            }
        }
        let Some((j, _)) = entering else {
            return Ok(StepOutcome::Optimal);
        };

        // Direction through the basis.
        let mut y = vec![0.0; self.m];
        for &(i, a) in &self.cols[j] {
            if a != 0.0 {
                for r in 0..self.m {
                    y[r] += self.binv[r * self.m + i] * a;
                }
            }
        }
        let sigma = if self.state[j] == VarState::AtLower {
            1.0
        } else {
            -1.0
        };

        // Ratio test: first blocking basic variable, ties to the smallest
        // variable index; the entering variable's own range competes too.
        let t_bound = self.upper[j] - self.lower[j];
        let mut t_best = f64::INFINITY;
        let mut leave: Option<(usize, bool)> = None; // (row, hit_upper)
        for r in 0..self.m {
            let g = sigma * y[r];
            let bv = self.basis[r];
            let (t, hit_upper) = if g > PIVOT_TOL {
                ((self.xb[r] - self.lower[bv]).max(0.0) / g, false)
            } else if g < -PIVOT_TOL {
                if self.upper[bv].is_finite() {
                    ((self.xb[r] - self.upper[bv]).min(0.0) / g, true)
                } else {
                    continue;
                }
            } else {
                continue;
            };
            let better = match leave {
                None => t < t_best - 0.0,
                Some((prev, _)) => {
                    t < t_best - 1e-12 || (t <= t_best + 1e-12 && bv < self.basis[prev])
                }
            };
            if better {
                t_best = t;
                leave = Some((r, hit_upper));
            }
        }

        if leave.is_none() && !t_bound.is_finite() {
            return Ok(StepOutcome::Unbounded);
        }

        if t_bound < t_best {
            // Bound flip: the entering variable runs to its other bound.
            self.state[j] = if sigma > 0.0 {
                VarState::AtUpper
            } else {
                VarState::AtLower
            };
            self.pivots += 1;
            self.recompute_xb();
            return Ok(StepOutcome::Progress);
        }

        let (r, hit_upper) = leave.expect("blocking row exists");
        let leaving = self.basis[r];
        self.state[leaving] = if hit_upper {
            VarState::AtUpper
        } else {
            VarState::AtLower
        };
        self.state[j] = VarState::Basic;
        self.basis[r] = j;

        // Eta update of the inverse.
        let piv = y[r];
        if piv.abs() < PIVOT_TOL {
            return Err(SimplexError::SingularBasis);
        }
        let m = self.m;
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        for i in 0..m {
            if i != r {
                let f = y[i];
                if f != 0.0 {
                    for k in 0..m {
                        self.binv[i * m + k] -= f * self.binv[r * m + k];
                    }
                }
            }
        }
        self.pivots += 1;
        if self.pivots % 512 == 0 {
            self.refactorize()?;
        }
        self.recompute_xb();
        Ok(StepOutcome::Progress)
    }

    fn objective_value(&self) -> f64 {
        let mut v = 0.0;
        for j in 0..self.n_total {
            let xv = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower => self.lower[j],
                VarState::AtUpper => self.upper[j],
            };
            v += self.cost[j] * xv;
        }
        for r in 0..self.m {
            v += self.cost[self.basis[r]] * self.xb[r];
        }
        v
    }

    fn minimize(&mut self, max_iters: usize) -> Result<StepOutcome, SimplexError> {
        self.recompute_xb();
        let mut stall = 0usize;
        let mut last_obj = self.objective_value();
        for _ in 0..max_iters {
            let bland = stall >= STALL_LIMIT;
            match self.step(bland)? {
                StepOutcome::Optimal => return Ok(StepOutcome::Optimal),
                StepOutcome::Unbounded => return Ok(StepOutcome::Unbounded),
                StepOutcome::Progress => {
                    let obj = self.objective_value();
                    if obj < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
                        stall = 0;
                        last_obj = obj;
                    } else {
                        stall += 1;
                    }
                }
            }
        }
        Err(SimplexError::IterationLimit)
    }

    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_structural];
        for j in 0..self.n_structural {
            x[j] = match self.state[j] {
                VarState::AtLower => self.lower[j],
                VarState::AtUpper => self.upper[j],
                VarState::Basic => 0.0,
            };
        }
        for r in 0..self.m {
            let j = self.basis[r];
            if j < self.n_structural {
                x[j] = self.xb[r];
            }
        }
        x
    }
}

/// Solves the program to proven optimality, infeasibility or unboundedness.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome, SimplexError> {
    let n = lp.n_vars;
    if lp.objective.len() != n || lp.lower.len() != n || lp.upper.len() != n {
        return Err(SimplexError::Dimensions);
    }
    for j in 0..n {
        if !lp.lower[j].is_finite() || lp.upper[j] < lp.lower[j] {
            return Err(SimplexError::BadBounds(j));
        }
    }

    let m = lp.rows.len();
    if m == 0 {
        let mut x = vec![0.0; n];
        let mut value = 0.0;
        for j in 0..n {
            let c = lp.objective[j];
            x[j] = if c < 0.0 {
                if !lp.upper[j].is_finite() {
                    return Ok(LpOutcome::Unbounded);
                }
                lp.upper[j]
            } else {
                lp.lower[j]
            };
            value += c * x[j];
        }
        return Ok(LpOutcome::Optimal { value, x });
    }

    // Normalize rows to <= / == and build sparse columns.
    let n_slack = m;
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + n_slack];
    let mut rhs = vec![0.0; m];
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    lower.resize(n + n_slack, 0.0);
    upper.resize(n + n_slack, f64::INFINITY);
    for (i, row) in lp.rows.iter().enumerate() {
        let flip = if row.cmp == Cmp::Ge { -1.0 } else { 1.0 };
        rhs[i] = row.rhs * flip;
        for &(j, a) in &row.coeffs {
            if a != 0.0 {
                cols[j].push((i, a * flip));
            }
        }
        let s = n + i;
        cols[s].push((i, 1.0));
        if row.cmp == Cmp::Eq {
            upper[s] = 0.0;
        }
    }
    for col in cols.iter_mut() {
        col.sort_by_key(|&(i, _)| i);
        // Merge duplicate row indices from repeated coefficients.
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
        for &(i, a) in col.iter() {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += a,
                _ => merged.push((i, a)),
            }
        }
        *col = merged;
    }

    // Initial point: structurals at lower bound; slacks basic where that is
    // feasible, otherwise an artificial column carries the violation.
    let mut residual = rhs.clone();
    for j in 0..n {
        if lower[j] != 0.0 {
            for &(i, a) in &cols[j] {
                residual[i] -= a * lower[j];
            }
        }
    }
    let mut state = vec![VarState::AtLower; n + n_slack];
    let mut basis = Vec::with_capacity(m);
    let mut binv_diag = Vec::with_capacity(m);
    let mut artificial_rows = Vec::new();
    for i in 0..m {
        let s = n + i;
        let slack_ok = residual[i] >= 0.0 && residual[i] <= upper[s];
        if slack_ok {
            state[s] = VarState::Basic;
            basis.push(s);
            binv_diag.push(1.0);
        } else {
            artificial_rows.push(i);
            basis.push(usize::MAX); // patched below
            binv_diag.push(if residual[i] >= 0.0 { 1.0 } else { -1.0 });
        }
    }
    let n_art = artificial_rows.len();
    let n_total = n + n_slack + n_art;
    cols.resize(n_total, Vec::new());
    lower.resize(n_total, 0.0);
    upper.resize(n_total, f64::INFINITY);
    let mut state_full = state;
    state_full.resize(n_total, VarState::AtLower);
    for (k, &i) in artificial_rows.iter().enumerate() {
        let a = n + n_slack + k;
        let sign = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
        cols[a].push((i, sign));
        basis[i] = a;
        state_full[a] = VarState::Basic;
    }

    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = binv_diag[i];
    }

    let mut core = Core {
        m,
        n_total,
        n_structural: n,
        cols,
        lower,
        upper,
        cost: vec![0.0; n_total],
        rhs,
        basis,
        state: state_full,
        binv,
        xb: vec![0.0; m],
        pivots: 0,
    };

    let max_iters = 50_000 + 100 * (n_total + m);
    let bmax = core
        .rhs
        .iter()
        .map(|v| v.abs())
        .fold(0.0_f64, f64::max);

    if n_art > 0 {
        for k in 0..n_art {
            core.cost[n + n_slack + k] = 1.0;
        }
        match core.minimize(max_iters)? {
            StepOutcome::Optimal => {}
            // Phase one is bounded below by zero, so this cannot trigger.
            StepOutcome::Unbounded => return Err(SimplexError::SingularBasis),
            StepOutcome::Progress => unreachable!(),
        }
        let infeas = core.objective_value();
        if infeas > 1e-8 * (1.0 + bmax) {
            return Ok(LpOutcome::Infeasible);
        }
        // Pin artificials at zero for phase two.
        for k in 0..n_art {
            let a = n + n_slack + k;
            core.cost[a] = 0.0;
            core.upper[a] = 0.0;
        }
    }

    core.cost = vec![0.0; core.n_total];
    core.cost[..n].copy_from_slice(&lp.objective);
    match core.minimize(max_iters)? {
        StepOutcome::Optimal => {
            let x = core.solution();
            let value = lp
                .objective
                .iter()
                .zip(&x)
                .map(|(&c, &v)| c * v)
                .sum();
            Ok(LpOutcome::Optimal { value, x })
        }
        StepOutcome::Unbounded => Ok(LpOutcome::Unbounded),
        StepOutcome::Progress => unreachable!(),
    }
}
