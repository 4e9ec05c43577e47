//! Agent and centralized optimization problems: continuous best response
//! (LP), regularized best response (convex QP through its KKT system and
//! Lemke), discrete best response (subset enumeration or branch-and-bound),
//! and the pooled-budget / per-budget centralized problems.

use thiserror::Error;

use crate::dense::Mat;
use crate::gnep::KktResiduals;
use crate::instance::{
    aftermath_lengths, big_m, shortest_path_with, InstanceError, InterdictionInstance, Mode,
    StrategyProfile, Topology, FEASIBILITY_TOL,
};
use crate::lcp::{lemke_solve, LcpError, LcpProblem, LcpStatus};
use crate::simplex::{lp_solve, Cmp, LinearProgram, LpOutcome, SimplexError};

/// Candidate-arc threshold below which the discrete best response is solved
/// by exhaustive subset enumeration instead of branch-and-bound.
pub const ENUMERATION_LIMIT: usize = 20;

/// Node budget for exact searches.
pub const SEARCH_NODE_CAP: usize = 1_000_000;

/// Strict-improvement margin used when comparing candidate payoffs.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SubproblemError {
    #[error("agent index {0} out of range")]
    AgentIndex(usize),
    #[error("operation requires {0:?} mode")]
    WrongMode(Mode),
    #[error("linear program unexpectedly {0}")]
    UnexpectedLp(&'static str),
    #[error("regularized subproblem ended with {0:?}")]
    RegularizedSolveFailed(LcpStatus),
    #[error("exact search exceeded its budget: {0}")]
    SearchLimit(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Lcp(#[from] LcpError),
}

/// Result of a continuous best response: the optimal obstruction value and
/// the optimizing interdiction vector with its dual potentials.
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Builds agent `agent_index`'s best-response LP in minimization form over
/// variables `(x, y)`: arc rows, the budget row, and potentials boxed to
/// `[0, M]`.
pub fn agent_lp(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<LinearProgram, SubproblemError> {
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(SubproblemError::AgentIndex(agent_index))?;
    profile.check_shape(instance)?;
    let topo = Topology::new(&instance.network);
    let m = instance.n_arcs();
    let n = instance.n_nodes();
    let bound = big_m(instance);

    let mut lp = LinearProgram::new(m + n);
    for u in 0..n {
        lp.upper[m + u] = bound;
    }
    lp.objective[m + topo.node_index[&agent.source]] = 1.0;
    lp.objective[m + topo.node_index[&agent.target]] = -1.0;
    for (a, arc) in instance.network.arcs.iter().enumerate() {
        let (u, v) = topo.arc_ends[a];
        let mut rhs = -arc.d0;
        for (f, row) in profile.x.iter().enumerate() {
            if f != agent_index {
                rhs -= row[a];
            }
        }
        let mut coeffs = vec![(a, 1.0)];
        if u == v {
            // Self-loop: potentials cancel.
        } else {
            coeffs.push((m + u, 1.0));
            coeffs.push((m + v, -1.0));
        }
        lp.add_row(Cmp::Ge, rhs, coeffs);
    }
    lp.add_row(
        Cmp::Le,
        agent.budget,
        agent.costs.iter().cloned().enumerate().collect(),
    );
    Ok(lp)
}

/// Maximizes agent `agent_index`'s obstruction value with all other agents'
/// efforts held fixed (continuous mode).
pub fn best_response_continuous(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<BestResponse, SubproblemError> {
    if instance.mode != Mode::Continuous {
        return Err(SubproblemError::WrongMode(instance.mode));
    }
    let lp = agent_lp(instance, profile, agent_index)?;
    let m = instance.n_arcs();
    match lp_solve(&lp)? {
        LpOutcome::Optimal { value, x } => Ok(BestResponse {
            value: -value,
            y: x[m..].to_vec(),
            x: x[..m].to_vec(),
        }),
        LpOutcome::Infeasible => Err(SubproblemError::UnexpectedLp("infeasible")),
        LpOutcome::Unbounded => Err(SubproblemError::UnexpectedLp("unbounded")),
    }
}

/// Regularized agent subproblem: the base LP plus a proximal anchor.
#[derive(Debug, Clone)]
pub struct RegularizedSubproblem {
    pub base: LinearProgram,
    pub anchor: Vec<f64>,
    pub tau: f64,
    rows: Mat,
    rhs: Vec<f64>,
    n_point: usize,
    source_col: usize,
    target_col: usize,
}

impl RegularizedSubproblem {
    /// Assembles the subproblem for one agent. The anchor is the agent's
    /// current `(x, y)` point; `tau > 0` weighs the proximal term.
    pub fn build(
        instance: &InterdictionInstance,
        profile: &StrategyProfile,
        agent_index: usize,
        anchor: &[f64],
        tau: f64,
    ) -> Result<Self, SubproblemError> {
        if instance.mode != Mode::Continuous {
            return Err(SubproblemError::WrongMode(instance.mode));
        }
        assert!(tau > 0.0, "tau must be positive");
        let base = agent_lp(instance, profile, agent_index)?;
        let m = instance.n_arcs();
        let n = instance.n_nodes();
        let n_point = m + n;
        assert_eq!(anchor.len(), n_point, "anchor must cover (x, y)");
        let bound = big_m(instance);

        // Rows in >= form over (x, y): arc rows, negated budget row, and
        // upper bounds on the potentials.
        let n_rows = m + 1 + n;
        let mut rows = Mat::zeros(n_rows, n_point);
        let mut rhs = vec![0.0; n_rows];
        let topo = Topology::new(&instance.network);
        for (a, arc) in instance.network.arcs.iter().enumerate() {
            let (u, v) = topo.arc_ends[a];
            rows.set(a, a, 1.0);
            if u != v {
                rows.add_to(a, m + u, 1.0);
                rows.add_to(a, m + v, -1.0);
            }
            let mut r = -arc.d0;
            for (f, row) in profile.x.iter().enumerate() {
                if f != agent_index {
                    r -= row[a];
                }
            }
            rhs[a] = r;
        }
        let agent = &instance.agents[agent_index];
        for (a, &c) in agent.costs.iter().enumerate() {
            rows.set(m, a, -c);
        }
        rhs[m] = -agent.budget;
        for u in 0..n {
            rows.set(m + 1 + u, m + u, -1.0);
            rhs[m + 1 + u] = -bound;
        }

        let source_col = m + topo.node_index[&agent.source];
        let target_col = m + topo.node_index[&agent.target];
        Ok(RegularizedSubproblem {
            base,
            anchor: anchor.to_vec(),
            tau,
            rows,
            rhs,
            n_point,
            source_col,
            target_col,
        })
    }

    /// KKT system of the proximal problem as an LCP over `(point, duals)`.
    fn to_lcp(&self) -> LcpProblem {
        let np = self.n_point;
        let nr = self.rhs.len();
        let dim = np + nr;
        let mut m = Mat::zeros(dim, dim);
        for j in 0..np {
            m.set(j, j, 2.0 * self.tau);
        }
        for i in 0..nr {
            for j in 0..np {
                let v = self.rows.get(i, j);
                if v != 0.0 {
                    m.set(np + i, j, v);
                    m.set(j, np + i, -v);
                }
            }
        }
        let mut q = vec![0.0; dim];
        for j in 0..np {
            q[j] = -2.0 * self.tau * self.anchor[j];
        }
        q[self.source_col] += 1.0;
        q[self.target_col] -= 1.0;
        for i in 0..nr {
            q[np + i] = -self.rhs[i];
        }
        LcpProblem::new(q, m).expect("square by construction")
    }
}

/// Solution of a regularized best response. `value` is the unregularized
/// obstruction value at the proximal optimizer.
#[derive(Debug, Clone)]
pub struct RegularizedBestResponse {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub kkt: KktResiduals,
}

/// Solves the proximal subproblem by Lemke's method on its KKT system. Ray
/// termination or a pivot-limit hit is reported as a solver failure so the
/// caller can reorder agents or change `tau`.
pub fn best_response_regularized(
    subproblem: &RegularizedSubproblem,
    instance: &InterdictionInstance,
) -> Result<RegularizedBestResponse, SubproblemError> {
    let lcp = subproblem.to_lcp();
    let max_pivots = 100 * lcp.dim() + 1000;
    let sol = lemke_solve(&lcp, None, max_pivots)?;
    if sol.status != LcpStatus::Solved {
        return Err(SubproblemError::RegularizedSolveFailed(sol.status));
    }
    let np = subproblem.n_point;
    let m = instance.n_arcs();
    let point = &sol.w[..np];
    let duals = &sol.w[np..];

    let stationarity = sol.slack[..np]
        .iter()
        .fold(0.0_f64, |acc, &v| acc.max(-v));
    let primal = sol.slack[np..]
        .iter()
        .chain(point.iter())
        .fold(0.0_f64, |acc, &v| acc.max(-v));
    let comp_point: f64 = point
        .iter()
        .zip(&sol.slack[..np])
        .map(|(&a, &b)| a * b)
        .sum();
    let comp_dual: f64 = duals
        .iter()
        .zip(&sol.slack[np..])
        .map(|(&a, &b)| a * b)
        .sum();
    let kkt = KktResiduals {
        stationarity,
        primal,
        complementarity: comp_point.abs().max(comp_dual.abs()),
    };

    let value = point[subproblem.target_col] - point[subproblem.source_col];
    Ok(RegularizedBestResponse {
        value,
        x: point[..m].to_vec(),
        y: point[m..np].to_vec(),
        kkt,
    })
}

/// Result of a discrete best response.
#[derive(Debug, Clone)]
pub struct DiscreteBestResponse {
    pub value: f64,
    pub x: Vec<f64>,
}

/// Arcs worth toggling for the agent: a positive extension, not already
/// interdicted by someone else, and affordable on its own.
fn discrete_candidates(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Vec<usize> {
    let agent = &instance.agents[agent_index];
    let mut cands = Vec::new();
    for (a, arc) in instance.network.arcs.iter().enumerate() {
        if arc.e <= 0.0 {
            continue;
        }
        let taken = profile
            .x
            .iter()
            .enumerate()
            .any(|(f, row)| f != agent_index && row[a] > 0.5);
        if taken {
            continue;
        }
        if agent.costs[a] <= agent.budget + FEASIBILITY_TOL {
            cands.push(a);
        }
    }
    cands
}

/// Arc lengths with the agent's own efforts stripped out.
fn base_lengths(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<Vec<f64>, SubproblemError> {
    let mut stripped = profile.clone();
    for v in stripped.x[agent_index].iter_mut() {
        *v = 0.0;
    }
    Ok(aftermath_lengths(instance, &stripped)?)
}

/// Exact discrete best response by exhaustive subset enumeration. Among
/// equal-value responses the lexicographically smallest arc subset wins, so
/// "change nothing" beats any cosmetic interdiction.
pub fn best_response_discrete_exhaustive(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<DiscreteBestResponse, SubproblemError> {
    if instance.mode != Mode::Discrete {
        return Err(SubproblemError::WrongMode(instance.mode));
    }
    profile.check_shape(instance)?;
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(SubproblemError::AgentIndex(agent_index))?;
    let topo = Topology::new(&instance.network);
    let cands = discrete_candidates(instance, profile, agent_index);
    let base = base_lengths(instance, profile, agent_index)?;

    let mut lengths = base.clone();
    let mut best_subset: Vec<usize> = Vec::new();
    let mut best_value = shortest_path_with(instance, &topo, &lengths, agent_index)?.0;

    // Depth-first over candidate subsets with budget pruning.
    struct Ctx<'a> {
        instance: &'a InterdictionInstance,
        topo: &'a Topology,
        cands: &'a [usize],
        costs: &'a [f64],
        budget: f64,
        agent: usize,
    }
    fn walk(
        ctx: &Ctx,
        idx: usize,
        spend: f64,
        subset: &mut Vec<usize>,
        lengths: &mut Vec<f64>,
        best_value: &mut f64,
        best_subset: &mut Vec<usize>,
    ) -> Result<(), SubproblemError> {
        if idx == ctx.cands.len() {
            if subset.is_empty() {
                return Ok(());
            }
            let value = shortest_path_with(ctx.instance, ctx.topo, lengths, ctx.agent)?.0;
            let better = value > *best_value + TIE_TOL
                || ((value - *best_value).abs() <= TIE_TOL
                    && subset.as_slice() < best_subset.as_slice());
            if better {
                *best_value = value;
                *best_subset = subset.clone();
            }
            return Ok(());
        }
        let a = ctx.cands[idx];
        walk(ctx, idx + 1, spend, subset, lengths, best_value, best_subset)?;
        let c = ctx.costs[a];
        if spend + c <= ctx.budget + FEASIBILITY_TOL {
            let saved = lengths[a];
            lengths[a] = ctx.instance.network.arcs[a].d0 + ctx.instance.network.arcs[a].e;
            subset.push(a);
            walk(
                ctx,
                idx + 1,
                spend + c,
                subset,
                lengths,
                best_value,
                best_subset,
            )?;
            subset.pop();
            lengths[a] = saved;
        }
        Ok(())
    }
    let ctx = Ctx {
        instance,
        topo: &topo,
        cands: &cands,
        costs: &agent.costs,
        budget: agent.budget,
        agent: agent_index,
    };
    let mut subset = Vec::new();
    walk(
        &ctx,
        0,
        0.0,
        &mut subset,
        &mut lengths,
        &mut best_value,
        &mut best_subset,
    )?;

    let mut x = vec![0.0; instance.n_arcs()];
    for &a in &best_subset {
        x[a] = 1.0;
    }
    Ok(DiscreteBestResponse {
        value: best_value,
        x,
    })
}

/// Discrete best response by depth-first branch-and-bound with LP-relaxation
/// bounds; candidate arcs relax to `[0, 1]`.
pub fn best_response_discrete_branch_bound(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<DiscreteBestResponse, SubproblemError> {
    if instance.mode != Mode::Discrete {
        return Err(SubproblemError::WrongMode(instance.mode));
    }
    profile.check_shape(instance)?;
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(SubproblemError::AgentIndex(agent_index))?;
    let topo = Topology::new(&instance.network);
    let cands = discrete_candidates(instance, profile, agent_index);
    let base = base_lengths(instance, profile, agent_index)?;
    let bound_m = big_m(instance);
    let k = cands.len();
    let n = instance.n_nodes();

    let eval = |chosen: &[usize]| -> Result<f64, SubproblemError> {
        let mut lengths = base.clone();
        for &a in chosen {
            lengths[a] = instance.network.arcs[a].d0 + instance.network.arcs[a].e;
        }
        Ok(shortest_path_with(instance, &topo, &lengths, agent_index)?.0)
    };

    let mut best_subset: Vec<usize> = Vec::new();
    let mut best_value = eval(&[])?;

    // Relaxation over free candidates: variables are the candidate efforts
    // then the potentials.
    let relax = |fixed_one: &[bool], fixed_zero: &[bool]| -> Result<LpOutcome, SubproblemError> {
        let mut lp = LinearProgram::new(k + n);
        for j in 0..k {
            if fixed_one[j] {
                lp.lower[j] = 1.0;
                lp.upper[j] = 1.0;
            } else if fixed_zero[j] {
                lp.upper[j] = 0.0;
            } else {
                lp.upper[j] = 1.0;
            }
        }
        for u in 0..n {
            lp.upper[k + u] = bound_m;
        }
        lp.objective[k + topo.node_index[&agent.source]] = 1.0;
        lp.objective[k + topo.node_index[&agent.target]] = -1.0;
        let cand_pos: std::collections::BTreeMap<usize, usize> =
            cands.iter().enumerate().map(|(j, &a)| (a, j)).collect();
        for (a, arc) in instance.network.arcs.iter().enumerate() {
            let (u, v) = topo.arc_ends[a];
            let mut coeffs = Vec::new();
            if u != v {
                coeffs.push((k + u, 1.0));
                coeffs.push((k + v, -1.0));
            }
            let rhs = if let Some(&j) = cand_pos.get(&a) {
                coeffs.push((j, arc.e));
                -base[a]
            } else {
                -base[a]
            };
            lp.add_row(Cmp::Ge, rhs, coeffs);
        }
        lp.add_row(
            Cmp::Le,
            agent.budget,
            (0..k).map(|j| (j, agent.costs[cands[j]])).collect(),
        );
        Ok(lp_solve(&lp)?)
    };

    struct Node {
        fixed_one: Vec<bool>,
        fixed_zero: Vec<bool>,
        spend: f64,
    }
    let mut stack = vec![Node {
        fixed_one: vec![false; k],
        fixed_zero: vec![false; k],
        spend: 0.0,
    }];
    let mut visited = 0usize;
    while let Some(node) = stack.pop() {
        visited += 1;
        if visited > SEARCH_NODE_CAP {
            return Err(SubproblemError::SearchLimit(format!(
                "branch-and-bound exceeded {SEARCH_NODE_CAP} nodes"
            )));
        }
        if node.spend > agent.budget + FEASIBILITY_TOL {
            continue;
        }
        let LpOutcome::Optimal { value, x } = relax(&node.fixed_one, &node.fixed_zero)? else {
            continue;
        };
        let ub = -value;
        if ub <= best_value + TIE_TOL {
            continue;
        }
        // Branch on the most fractional candidate.
        let mut branch: Option<(usize, f64)> = None;
        for j in 0..k {
            if node.fixed_one[j] || node.fixed_zero[j] {
                continue;
            }
            let frac = (x[j] - 0.5).abs();
            if x[j] > 1e-9 && x[j] < 1.0 - 1e-9 {
                match branch {
                    Some((_, bf)) if frac >= bf => {}
                    _ => branch = Some((j, frac)),
                }
            }
        }
        match branch {
            None => {
                // Integral relaxation: round and evaluate exactly.
                let chosen: Vec<usize> = (0..k)
                    .filter(|&j| node.fixed_one[j] || x[j] > 0.5)
                    .map(|j| cands[j])
                    .collect();
                let spend: f64 = chosen.iter().map(|&a| agent.costs[a]).sum();
                if spend <= agent.budget + FEASIBILITY_TOL {
                    let v = eval(&chosen)?;
                    if v > best_value + TIE_TOL {
                        best_value = v;
                        best_subset = chosen;
                    }
                }
            }
            Some((j, _)) => {
                let mut take = Node {
                    fixed_one: node.fixed_one.clone(),
                    fixed_zero: node.fixed_zero.clone(),
                    spend: node.spend + agent.costs[cands[j]],
                };
                take.fixed_one[j] = true;
                let mut drop = Node {
                    fixed_one: node.fixed_one,
                    fixed_zero: node.fixed_zero,
                    spend: node.spend,
                };
                drop.fixed_zero[j] = true;
                // Explore the drop branch first: ties then favor smaller
                // subsets, matching the enumeration tie-break.
                stack.push(take);
                stack.push(drop);
            }
        }
    }

    let mut x = vec![0.0; instance.n_arcs()];
    for &a in &best_subset {
        x[a] = 1.0;
    }
    Ok(DiscreteBestResponse {
        value: best_value,
        x,
    })
}

/// Exact discrete best response; enumerates when few arcs are in play and
/// branches otherwise.
pub fn best_response_discrete(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<DiscreteBestResponse, SubproblemError> {
    let cands = discrete_candidates(instance, profile, agent_index);
    if cands.len() <= ENUMERATION_LIMIT {
        best_response_discrete_exhaustive(instance, profile, agent_index)
    } else {
        best_response_discrete_branch_bound(instance, profile, agent_index)
    }
}

/// Pooled-budget centralized problem for continuous interdiction. Returns
/// the optimal welfare and an optimal joint profile.
pub fn centralized_continuous(
    instance: &InterdictionInstance,
) -> Result<(f64, StrategyProfile), SubproblemError> {
    if instance.mode != Mode::Continuous {
        return Err(SubproblemError::WrongMode(instance.mode));
    }
    let topo = Topology::new(&instance.network);
    let m = instance.n_arcs();
    let n = instance.n_nodes();
    let nf = instance.n_agents();
    let blk = m + n;
    let bound = big_m(instance);

    let mut lp = LinearProgram::new(nf * blk);
    for f in 0..nf {
        let off = f * blk;
        for u in 0..n {
            lp.upper[off + m + u] = bound;
        }
        let agent = &instance.agents[f];
        lp.objective[off + m + topo.node_index[&agent.source]] = 1.0;
        lp.objective[off + m + topo.node_index[&agent.target]] = -1.0;
        for (a, arc) in instance.network.arcs.iter().enumerate() {
            let (u, v) = topo.arc_ends[a];
            let mut coeffs = Vec::with_capacity(nf + 2);
            for fp in 0..nf {
                coeffs.push((fp * blk + a, 1.0));
            }
            if u != v {
                coeffs.push((off + m + u, 1.0));
                coeffs.push((off + m + v, -1.0));
            }
            lp.add_row(Cmp::Ge, -arc.d0, coeffs);
        }
    }
    let pooled: f64 = instance.agents.iter().map(|a| a.budget).sum();
    let mut budget_row = Vec::with_capacity(nf * m);
    for (f, agent) in instance.agents.iter().enumerate() {
        for (a, &c) in agent.costs.iter().enumerate() {
            budget_row.push((f * blk + a, c));
        }
    }
    lp.add_row(Cmp::Le, pooled, budget_row);

    match lp_solve(&lp)? {
        LpOutcome::Optimal { value, x } => {
            let profile = StrategyProfile {
                x: (0..nf)
                    .map(|f| x[f * blk..f * blk + m].to_vec())
                    .collect(),
            };
            Ok((-value, profile))
        }
        LpOutcome::Infeasible => Err(SubproblemError::UnexpectedLp("infeasible")),
        LpOutcome::Unbounded => Err(SubproblemError::UnexpectedLp("unbounded")),
    }
}

/// Exact centralized optimum for discrete interdiction with per-agent
/// budgets, by exhaustive search over joint interdiction subsets with a
/// monotone union bound. Errors when the joint space is too large for a
/// desk-scale exact search.
pub fn centralized_discrete(
    instance: &InterdictionInstance,
) -> Result<(f64, StrategyProfile), SubproblemError> {
    if instance.mode != Mode::Discrete {
        return Err(SubproblemError::WrongMode(instance.mode));
    }
    let m = instance.n_arcs();
    if m > 120 {
        return Err(SubproblemError::SearchLimit(format!(
            "{m} arcs exceed the exact-search mask width"
        )));
    }
    let topo = Topology::new(&instance.network);
    let zero = StrategyProfile::zeros(instance);
    let nf = instance.n_agents();

    // An optimal joint choice never pays twice for one arc, so the search
    // walks partition assignments: each agent picks among its affordable
    // arcs not already covered by earlier agents.
    let candidates: Vec<Vec<usize>> = (0..nf)
        .map(|f| discrete_candidates(instance, &zero, f))
        .collect();

    let welfare_of_union = |mask: u128| -> Result<f64, SubproblemError> {
        let lengths: Vec<f64> = instance
            .network
            .arcs
            .iter()
            .enumerate()
            .map(|(a, arc)| {
                if mask & (1u128 << a) != 0 {
                    arc.d0 + arc.e
                } else {
                    arc.d0
                }
            })
            .collect();
        let mut total = 0.0;
        for f in 0..nf {
            total += shortest_path_with(instance, &topo, &lengths, f)?.0;
        }
        Ok(total)
    };

    // Everything agents f.. could still touch, for the monotone bound.
    let mut tail_union = vec![0u128; nf + 1];
    for f in (0..nf).rev() {
        let all: u128 = candidates[f].iter().fold(0, |acc, &a| acc | (1u128 << a));
        tail_union[f] = tail_union[f + 1] | all;
    }

    struct Search<'a> {
        instance: &'a InterdictionInstance,
        candidates: &'a [Vec<usize>],
        tail_union: &'a [u128],
        nf: usize,
        nodes: usize,
        best_value: f64,
        best_masks: Vec<u128>,
    }
    impl Search<'_> {
        fn assign(
            &mut self,
            welfare: &dyn Fn(u128) -> Result<f64, SubproblemError>,
            f: usize,
            i: usize,
            spend: f64,
            union: u128,
            masks: &mut Vec<u128>,
        ) -> Result<(), SubproblemError> {
            self.nodes += 1;
            if self.nodes > 50 * SEARCH_NODE_CAP {
                return Err(SubproblemError::SearchLimit(format!(
                    "centralized search exceeded {} nodes",
                    50 * SEARCH_NODE_CAP
                )));
            }
            if f == self.nf {
                let v = welfare(union)?;
                if v > self.best_value + TIE_TOL {
                    self.best_value = v;
                    self.best_masks = masks.clone();
                }
                return Ok(());
            }
            if i == 0 {
                let ub = welfare(union | self.tail_union[f])?;
                if ub <= self.best_value + TIE_TOL {
                    return Ok(());
                }
            }
            if i == self.candidates[f].len() {
                return self.assign(welfare, f + 1, 0, 0.0, union, masks);
            }
            let a = self.candidates[f][i];
            let cost = self.instance.agents[f].costs[a];
            let coverable = union & (1u128 << a) == 0;
            if coverable && spend + cost <= self.instance.agents[f].budget + FEASIBILITY_TOL {
                masks[f] |= 1u128 << a;
                self.assign(welfare, f, i + 1, spend + cost, union | (1u128 << a), masks)?;
                masks[f] &= !(1u128 << a);
            }
            self.assign(welfare, f, i + 1, spend, union, masks)
        }
    }

    let mut search = Search {
        instance,
        candidates: &candidates,
        tail_union: &tail_union,
        nf,
        nodes: 0,
        best_value: f64::NEG_INFINITY,
        best_masks: vec![0u128; nf],
    };
    let mut masks = vec![0u128; nf];
    search.assign(&welfare_of_union, 0, 0, 0.0, 0, &mut masks)?;

    let best_value = search.best_value;
    let x = search
        .best_masks
        .iter()
        .map(|&mask| {
            (0..m)
                .map(|a| if mask & (1u128 << a) != 0 { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    Ok((best_value, StrategyProfile { x }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{feasible, shortest_path, social_welfare};
    use crate::ladder::{gen_ladder, ladder_equilibrium_construction, LadderSpec};
    use rand::{Rng, SeedableRng};

    #[test]
    fn lone_agent_best_response_on_ladder_is_half() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let zero = StrategyProfile::zeros(&inst);
        let br = best_response_continuous(&inst, &zero, 0).unwrap();
        // Oracle: agent 1's two paths are cut by the verticals (1,4) and
        // (2,5), both at cost 1; sweep the budget split between them.
        let mut grid_best = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            grid_best = grid_best.max(t.min(1.0 - t));
        }
        assert!((br.value - 0.5).abs() < 1e-9);
        assert!((br.value - grid_best).abs() < 1e-6);
    }

    #[test]
    fn tiny_budget_changes_nothing() {
        let mut inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        inst.agents[0].budget = 1e-12;
        let profile = StrategyProfile {
            x: vec![
                vec![0.0; 7],
                vec![0.0, 0.0, 0.2, 0.2, 0.2, 0.0, 0.0],
            ],
        };
        let (current, _) = shortest_path(&inst, &profile, 0).unwrap();
        let br = best_response_continuous(&inst, &profile, 0).unwrap();
        assert!((br.value - current).abs() < 1e-9);
    }

    #[test]
    fn best_response_dominates_current_value() {
        let inst = gen_ladder(&LadderSpec::continuous(3, 2.0));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let mut profile = StrategyProfile::zeros(&inst);
            for f in 0..3 {
                // Random budget-feasible spread over the arcs.
                let raw: Vec<f64> = (0..inst.n_arcs()).map(|_| rng.random::<f64>()).collect();
                let cost: f64 = raw
                    .iter()
                    .zip(&inst.agents[f].costs)
                    .map(|(&x, &c)| x * c)
                    .sum();
                let scale = rng.random::<f64>() / cost;
                profile.x[f] = raw.iter().map(|&v| v * scale).collect();
            }
            for f in 0..3 {
                let (current, _) = shortest_path(&inst, &profile, f).unwrap();
                let br = best_response_continuous(&inst, &profile, f).unwrap();
                assert!(br.value >= current - 1e-9);
                // Strong duality: the reported value equals the shortest
                // path under the optimizer's own aftermath.
                let mut shifted = profile.clone();
                shifted.x[f] = br.x.clone();
                let (replay, _) = shortest_path(&inst, &shifted, f).unwrap();
                assert!((br.value - replay).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn huge_tau_pins_the_anchor() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let profile = ladder_equilibrium_construction(2);
        let duals = crate::instance::potentials(&inst, &profile).unwrap();
        let mut anchor = profile.x[0].clone();
        anchor.extend_from_slice(&duals.y[0]);
        let sub = RegularizedSubproblem::build(&inst, &profile, 0, &anchor, 1e6).unwrap();
        let sol = best_response_regularized(&sub, &inst).unwrap();
        let dist = sol
            .x
            .iter()
            .zip(&profile.x[0])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(dist <= 1e-3, "moved {dist}");
        // Residuals scale with the proximal weight.
        assert!(sol.kkt.max() <= 1e-8 * (1.0 + sub.tau), "kkt {:?}", sol.kkt);
    }

    #[test]
    fn regularized_solution_is_reproducible() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let zero = StrategyProfile::zeros(&inst);
        let anchor = vec![0.0; inst.n_arcs() + inst.n_nodes()];
        let sub = RegularizedSubproblem::build(&inst, &zero, 0, &anchor, 0.01).unwrap();
        let a = best_response_regularized(&sub, &inst).unwrap();
        let b = best_response_regularized(&sub, &inst).unwrap();
        assert_eq!(a.x, b.x);
        assert!(a.kkt.max() <= 1e-8);
    }

    #[test]
    fn discrete_response_prefers_no_change_on_ties() {
        let inst = gen_ladder(&LadderSpec::discrete(2));
        let mut profile = StrategyProfile::zeros(&inst);
        // Opponent floods every arc it can afford: only one, say (1,4).
        profile.x[1][2] = 1.0;
        let br = best_response_discrete(&inst, &profile, 0).unwrap();
        // No single arc helps agent 1 beyond the current value, so the
        // response stays clean.
        let (current, _) = shortest_path(&inst, &profile, 0).unwrap();
        assert_eq!(br.value, 1.0);
        assert!(current <= br.value);
    }

    #[test]
    fn discrete_branch_bound_matches_enumeration() {
        use crate::randgen::{gen_random, RandomSpec};
        for seed in 0..10 {
            let spec = RandomSpec {
                n_vertices: 6,
                density: 0.4,
                n_agents: Some(2),
                seed,
                mode: Mode::Discrete,
                common_pair: false,
                integral_lengths: true,
                ..RandomSpec::default()
            };
            let inst = gen_random(&spec).unwrap();
            let zero = StrategyProfile::zeros(&inst);
            for f in 0..2 {
                let a = best_response_discrete_exhaustive(&inst, &zero, f).unwrap();
                let b = best_response_discrete_branch_bound(&inst, &zero, f).unwrap();
                assert!(
                    (a.value - b.value).abs() <= 1e-9,
                    "seed {seed} agent {f}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn centralized_single_agent_equals_best_response() {
        let inst = gen_ladder(&LadderSpec::continuous(1, 2.0));
        let zero = StrategyProfile::zeros(&inst);
        let br = best_response_continuous(&inst, &zero, 0).unwrap();
        let (central, _) = centralized_continuous(&inst).unwrap();
        assert!((central - br.value).abs() < 1e-9);
    }

    #[test]
    fn centralized_dominates_sampled_feasible_profiles() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let (central, profile) = centralized_continuous(&inst).unwrap();
        let welfare = social_welfare(&inst, &profile).unwrap();
        assert!((central - welfare).abs() < 1e-8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let mut cand = StrategyProfile::zeros(&inst);
            for f in 0..2 {
                let raw: Vec<f64> = (0..7).map(|_| rng.random::<f64>()).collect();
                let cost: f64 = raw
                    .iter()
                    .zip(&inst.agents[f].costs)
                    .map(|(&x, &c)| x * c)
                    .sum();
                let scale = rng.random::<f64>() / cost;
                cand.x[f] = raw.iter().map(|&v| v * scale).collect();
                assert!(feasible(&inst, &cand, f).unwrap());
            }
            let w = social_welfare(&inst, &cand).unwrap();
            assert!(w <= central + 1e-7);
        }
    }

    #[test]
    fn centralized_discrete_ladder_reaches_two() {
        let inst = gen_ladder(&LadderSpec::discrete(2));
        let (value, profile) = centralized_discrete(&inst).unwrap();
        assert!((value - 2.0).abs() < 1e-12, "value {value}");
        let welfare = social_welfare(&inst, &profile).unwrap();
        assert!((welfare - 2.0).abs() < 1e-12);
    }

    #[test]
    fn centralized_discrete_with_starved_budgets() {
        let mut inst = gen_ladder(&LadderSpec::discrete(2));
        for agent in inst.agents.iter_mut() {
            agent.budget = 0.5; // below every cost
        }
        let (value, profile) = centralized_discrete(&inst).unwrap();
        let zero_welfare = social_welfare(&inst, &StrategyProfile::zeros(&inst)).unwrap();
        assert_eq!(value, zero_welfare);
        assert!(profile.x.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn budget_relaxation_is_monotone() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let zero = StrategyProfile::zeros(&inst);
        let mut last = -1.0;
        for budget in [0.25, 0.5, 1.0, 2.0] {
            let mut tweaked = inst.clone();
            tweaked.agents[0].budget = budget;
            let br = best_response_continuous(&tweaked, &zero, 0).unwrap();
            assert!(br.value >= last - 1e-9);
            last = br.value;
        }
    }
}
