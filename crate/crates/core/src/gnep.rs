//! GNEP assembly for continuous interdiction: per-agent LP blocks, the
//! stacked complementarity system over all agents, profile extraction and
//! equilibrium verification.
//!
//! Each agent maximizes the dual potential difference `y_t - y_s` subject to
//! arc rows `x_uv + y_u - y_v >= -(d0_uv + sum of other agents' efforts)`
//! and its budget row. Stacking every agent's optimality system produces an
//! LCP whose solutions are exactly the generalized Nash equilibria.

use thiserror::Error;

use crate::dense::Mat;
use crate::instance::{
    feasible, shortest_path, DualProfile, InstanceError, InterdictionInstance, Mode,
    StrategyProfile, Topology,
};
use crate::lcp::LcpProblem;
use crate::subproblems::{best_response_continuous, best_response_discrete, SubproblemError};

#[derive(Debug, Error)]
pub enum GnepError {
    #[error("operation requires continuous mode")]
    DiscreteUnsupported,
    #[error("agent index {0} out of range")]
    AgentIndex(usize),
    #[error("solution vector has {got} entries, layout expects {want}")]
    SolutionLength { got: usize, want: usize },
    #[error("profile is infeasible for agent {0}")]
    InfeasibleProfile(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Subproblem(#[from] SubproblemError),
}

/// Objective vector, constraint matrix and base right-hand side of one
/// agent's LP in minimization form: minimize `phi . (x, y)` subject to
/// `a_matrix (x, y) >= r_base - cross(x^{-f})`, `(x, y) >= 0`.
#[derive(Debug, Clone)]
pub struct AgentBlocks {
    pub phi: Vec<f64>,
    pub a_matrix: Mat,
    pub r_base: Vec<f64>,
}

/// Index map of the stacked system: agent `f` occupies one contiguous block
/// ordered `(x, y, lambda, beta)`.
#[derive(Debug, Clone, Copy)]
pub struct LcpLayout {
    pub n_agents: usize,
    pub n_arcs: usize,
    pub n_nodes: usize,
}

impl LcpLayout {
    pub fn block_len(&self) -> usize {
        2 * self.n_arcs + self.n_nodes + 1
    }

    pub fn dim(&self) -> usize {
        self.n_agents * self.block_len()
    }

    pub fn agent_offset(&self, f: usize) -> usize {
        f * self.block_len()
    }

    pub fn x_range(&self, f: usize) -> std::ops::Range<usize> {
        let o = self.agent_offset(f);
        o..o + self.n_arcs
    }

    pub fn y_range(&self, f: usize) -> std::ops::Range<usize> {
        let o = self.agent_offset(f) + self.n_arcs;
        o..o + self.n_nodes
    }

    pub fn lambda_range(&self, f: usize) -> std::ops::Range<usize> {
        let o = self.agent_offset(f) + self.n_arcs + self.n_nodes;
        o..o + self.n_arcs
    }

    pub fn beta_index(&self, f: usize) -> usize {
        self.agent_offset(f) + 2 * self.n_arcs + self.n_nodes
    }
}

/// The stacked LCP together with its coordinate layout.
#[derive(Debug, Clone)]
pub struct StackedLcp {
    pub problem: LcpProblem,
    pub layout: LcpLayout,
}

/// Builds agent `f`'s LP blocks. The constraint matrix is
/// `[I_m | G ; -c^T | 0]` with `G` the arc-node incidence pattern (+1 at the
/// tail, -1 at the head), and `r_base = (-d0, -b^f)`.
pub fn build_agent_blocks(
    instance: &InterdictionInstance,
    agent_index: usize,
) -> Result<AgentBlocks, GnepError> {
    if instance.mode != Mode::Continuous {
        return Err(GnepError::DiscreteUnsupported);
    }
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(GnepError::AgentIndex(agent_index))?;
    let topo = Topology::new(&instance.network);
    let m = instance.n_arcs();
    let n = instance.n_nodes();

    let mut a_matrix = Mat::zeros(m + 1, m + n);
    for (a, &(tail, head)) in topo.arc_ends.iter().enumerate() {
        a_matrix.set(a, a, 1.0);
        a_matrix.add_to(a, m + tail, 1.0);
        a_matrix.add_to(a, m + head, -1.0);
    }
    for (a, &c) in agent.costs.iter().enumerate() {
        a_matrix.set(m, a, -c);
    }

    let mut phi = vec![0.0; m + n];
    phi[m + topo.node_index[&agent.source]] = 1.0;
    phi[m + topo.node_index[&agent.target]] = -1.0;

    let mut r_base = Vec::with_capacity(m + 1);
    for arc in &instance.network.arcs {
        r_base.push(-arc.d0);
    }
    r_base.push(-agent.budget);

    Ok(AgentBlocks {
        phi,
        a_matrix,
        r_base,
    })
}

/// Right-hand side of agent `f`'s LP given the other agents' efforts:
/// `r_base` minus the cross-term that credits `x^{f'}` to the arc rows.
pub fn agent_rhs(
    instance: &InterdictionInstance,
    blocks: &AgentBlocks,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Vec<f64> {
    let m = instance.n_arcs();
    let mut r = blocks.r_base.clone();
    for (f, row) in profile.x.iter().enumerate() {
        if f == agent_index {
            continue;
        }
        for a in 0..m {
            r[a] -= row[a];
        }
    }
    r
}

/// Assembles the stacked LCP of the continuous game: skew blocks
/// `[0, -A^f; A^f, 0]` on the diagonal, identity couplings of the other
/// agents' `x` into each agent's arc rows off the diagonal, and
/// `q = (phi^1, d0, b^1, ..., phi^F, d0, b^F)`.
pub fn assemble_lcp(instance: &InterdictionInstance) -> Result<StackedLcp, GnepError> {
    if instance.mode != Mode::Continuous {
        return Err(GnepError::DiscreteUnsupported);
    }
    let layout = LcpLayout {
        n_agents: instance.n_agents(),
        n_arcs: instance.n_arcs(),
        n_nodes: instance.n_nodes(),
    };
    let m = layout.n_arcs;
    let n = layout.n_nodes;
    let blk = layout.block_len();
    let dim = layout.dim();

    let mut big = Mat::zeros(dim, dim);
    let mut q = vec![0.0; dim];
    for f in 0..layout.n_agents {
        let blocks = build_agent_blocks(instance, f)?;
        let off = layout.agent_offset(f);

        // q block: (phi^f, d0, b^f) = (phi^f, -r_base).
        q[off..off + m + n].copy_from_slice(&blocks.phi);
        for (a, rb) in blocks.r_base.iter().enumerate() {
            q[off + m + n + a] = -rb;
        }

        // Diagonal skew block.
        for i in 0..m + 1 {
            for j in 0..m + n {
                let v = blocks.a_matrix.get(i, j);
                if v != 0.0 {
                    big.set(off + m + n + i, off + j, v);
                    big.set(off + j, off + m + n + i, -v);
                }
            }
        }

        // Cross couplings: other agents' x relax this agent's arc rows.
        for fp in 0..layout.n_agents {
            if fp == f {
                continue;
            }
            let xoff = fp * blk;
            for a in 0..m {
                big.set(off + m + n + a, xoff + a, 1.0);
            }
        }
    }

    Ok(StackedLcp {
        problem: LcpProblem::new(q, big).expect("square by construction"),
        layout,
    })
}

/// Components of a stacked solution vector.
#[derive(Debug, Clone)]
pub struct ExtractedSolution {
    pub profile: StrategyProfile,
    pub duals: DualProfile,
    pub lambda: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
}

/// Slices a solution vector `w` of the stacked LCP into per-agent pieces.
pub fn extract_profile(
    stacked: &StackedLcp,
    w: &[f64],
) -> Result<ExtractedSolution, GnepError> {
    let layout = stacked.layout;
    if w.len() != layout.dim() {
        return Err(GnepError::SolutionLength {
            got: w.len(),
            want: layout.dim(),
        });
    }
    let mut x = Vec::with_capacity(layout.n_agents);
    let mut y = Vec::with_capacity(layout.n_agents);
    let mut lambda = Vec::with_capacity(layout.n_agents);
    let mut beta = Vec::with_capacity(layout.n_agents);
    for f in 0..layout.n_agents {
        x.push(w[layout.x_range(f)].to_vec());
        y.push(w[layout.y_range(f)].to_vec());
        lambda.push(w[layout.lambda_range(f)].to_vec());
        beta.push(w[layout.beta_index(f)]);
    }
    Ok(ExtractedSolution {
        profile: StrategyProfile { x },
        duals: DualProfile { y },
        lambda,
        beta,
    })
}

/// Inverse of [`extract_profile`]: rebuilds the stacked vector.
pub fn embed_solution(layout: &LcpLayout, parts: &ExtractedSolution) -> Vec<f64> {
    let mut w = vec![0.0; layout.dim()];
    for f in 0..layout.n_agents {
        w[layout.x_range(f)].copy_from_slice(&parts.profile.x[f]);
        w[layout.y_range(f)].copy_from_slice(&parts.duals.y[f]);
        w[layout.lambda_range(f)].copy_from_slice(&parts.lambda[f]);
        w[layout.beta_index(f)] = parts.beta[f];
    }
    w
}

/// Per-agent optimality residuals of a Karush-Kuhn-Tucker system.
#[derive(Debug, Clone, Copy)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.primal).max(self.complementarity)
    }
}

/// Per-agent best-response gaps of a profile.
#[derive(Debug, Clone)]
pub struct EquilibriumCheck {
    pub gaps: Vec<f64>,
    pub payoffs: Vec<f64>,
    pub tol: f64,
}

impl EquilibriumCheck {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_equilibrium(&self) -> bool {
        self.max_gap() <= self.tol
    }
}

/// Computes every agent's best-response gap: the optimal value of its
/// subproblem with the others fixed, minus its current obstruction value.
/// The profile is an equilibrium iff the largest gap is at most `tol`.
/// Verification looks at `x` only; potentials are recomputed from scratch.
pub fn verify_equilibrium(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    tol: f64,
) -> Result<EquilibriumCheck, GnepError> {
    profile.check_shape(instance)?;
    for f in 0..instance.n_agents() {
        if !feasible(instance, profile, f)? {
            return Err(GnepError::InfeasibleProfile(f));
        }
    }
    let mut gaps = Vec::with_capacity(instance.n_agents());
    let mut payoffs = Vec::with_capacity(instance.n_agents());
    for f in 0..instance.n_agents() {
        let (current, _) = shortest_path(instance, profile, f)?;
        let best = match instance.mode {
            Mode::Continuous => best_response_continuous(instance, profile, f)?.value,
            Mode::Discrete => best_response_discrete(instance, profile, f)?.value,
        };
        gaps.push(best - current);
        payoffs.push(current);
    }
    Ok(EquilibriumCheck { gaps, payoffs, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Agent, Arc, Network};
    use crate::ladder::{gen_ladder, ladder_equilibrium_construction, LadderSpec};
    use rand::{Rng, SeedableRng};

    fn one_arc_instance() -> InterdictionInstance {
        InterdictionInstance {
            network: Network {
                nodes: vec![1, 2],
                arcs: vec![Arc {
                    tail: 1,
                    head: 2,
                    d0: 1.0,
                    e: 0.0,
                }],
            },
            agents: vec![Agent {
                source: 1,
                target: 2,
                budget: 2.0,
                costs: vec![1.5],
            }],
            mode: Mode::Continuous,
        }
    }

    #[test]
    fn smallest_agent_block_shapes() {
        let inst = one_arc_instance();
        let blocks = build_agent_blocks(&inst, 0).unwrap();
        assert_eq!(blocks.a_matrix.nrows(), 2);
        assert_eq!(blocks.a_matrix.ncols(), 3);
        assert_eq!(blocks.a_matrix.get(0, 0), 1.0);
        assert_eq!(blocks.a_matrix.get(0, 1), 1.0);
        assert_eq!(blocks.a_matrix.get(0, 2), -1.0);
        assert_eq!(blocks.a_matrix.get(1, 0), -1.5);
        assert_eq!(blocks.a_matrix.get(1, 1), 0.0);
        assert_eq!(blocks.r_base, vec![-1.0, -2.0]);
    }

    #[test]
    fn ladder_agent_blocks_shape() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        for f in 0..2 {
            let blocks = build_agent_blocks(&inst, f).unwrap();
            assert_eq!(blocks.a_matrix.nrows(), 8);
            assert_eq!(blocks.a_matrix.ncols(), 13);
        }
    }

    #[test]
    fn objective_vector_is_source_minus_target() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let blocks = build_agent_blocks(&inst, 0).unwrap();
        let m = inst.n_arcs();
        // Node order 1..6; source 1, target 5.
        assert_eq!(blocks.phi[m], 1.0);
        assert_eq!(blocks.phi[m + 4], -1.0);
        assert_eq!(blocks.phi.iter().filter(|&&v| v != 0.0).count(), 2);
        // Dotted with (x, y) it reads y_source - y_target.
        let mut point = vec![0.0; m + inst.n_nodes()];
        point[m] = 0.25;
        point[m + 4] = 1.0;
        let dot: f64 = blocks.phi.iter().zip(&point).map(|(a, b)| a * b).sum();
        assert!((dot - (0.25 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn stacked_dimension_and_q_layout() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let stacked = assemble_lcp(&inst).unwrap();
        assert_eq!(stacked.problem.dim(), 42);
        let layout = stacked.layout;
        // q per agent: (phi, d0, b).
        for f in 0..2 {
            let off = layout.agent_offset(f);
            let q = &stacked.problem.q;
            for a in 0..layout.n_arcs {
                assert_eq!(q[off + layout.n_arcs + layout.n_nodes + a], 0.0);
            }
            assert_eq!(q[layout.beta_index(f)], 1.0);
            let _ = off;
        }
    }

    #[test]
    fn diagonal_blocks_are_skew_symmetric() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let stacked = assemble_lcp(&inst).unwrap();
        let layout = stacked.layout;
        let blk = layout.block_len();
        for f in 0..layout.n_agents {
            let off = layout.agent_offset(f);
            for i in 0..blk {
                for j in 0..blk {
                    let a = stacked.problem.m.get(off + i, off + j);
                    let b = stacked.problem.m.get(off + j, off + i);
                    assert!(
                        (a + b).abs() < 1e-15,
                        "diagonal block not skew at ({i}, {j})"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_form_matches_cross_term_decomposition() {
        // w' M w must equal the sum of lambda^f . x^{f'} over distinct
        // agent pairs for any nonnegative w.
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let stacked = assemble_lcp(&inst).unwrap();
        let layout = stacked.layout;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w: Vec<f64> = (0..layout.dim()).map(|_| rng.random::<f64>()).collect();
            let quad = stacked.problem.m.quad_form(&w);
            let parts = extract_profile(&stacked, &w).unwrap();
            let mut cross = 0.0;
            for f in 0..layout.n_agents {
                for fp in 0..layout.n_agents {
                    if f == fp {
                        continue;
                    }
                    cross += parts.lambda[f]
                        .iter()
                        .zip(&parts.profile.x[fp])
                        .map(|(&l, &x)| l * x)
                        .sum::<f64>();
                }
            }
            assert!((quad - cross).abs() < 1e-9 * (1.0 + quad.abs()));
            assert!(quad >= -1e-12);
        }
    }

    #[test]
    fn extraction_round_trips() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let stacked = assemble_lcp(&inst).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let w: Vec<f64> = (0..stacked.layout.dim())
            .map(|_| rng.random::<f64>())
            .collect();
        let parts = extract_profile(&stacked, &w).unwrap();
        let back = embed_solution(&stacked.layout, &parts);
        assert_eq!(back, w);

        let zero = vec![0.0; stacked.layout.dim()];
        let parts = extract_profile(&stacked, &zero).unwrap();
        assert!(parts.profile.x.iter().flatten().all(|&v| v == 0.0));
        assert!(parts.duals.y.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn discrete_mode_is_rejected() {
        let inst = gen_ladder(&LadderSpec::discrete(2));
        assert!(matches!(
            assemble_lcp(&inst),
            Err(GnepError::DiscreteUnsupported)
        ));
        assert!(matches!(
            build_agent_blocks(&inst, 0),
            Err(GnepError::DiscreteUnsupported)
        ));
    }

    #[test]
    fn constructed_ladder_equilibrium_verifies() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let profile = ladder_equilibrium_construction(2);
        let check = verify_equilibrium(&inst, &profile, 1e-6).unwrap();
        assert!(check.is_equilibrium(), "gaps: {:?}", check.gaps);
    }

    #[test]
    fn zero_profile_is_not_an_equilibrium_on_the_ladder() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let zero = StrategyProfile::zeros(&inst);
        let check = verify_equilibrium(&inst, &zero, 1e-6).unwrap();
        // Alone, agent 1 can reach 1/2 by splitting its budget across its
        // two vertical cut arcs.
        assert!(check.gaps[0] > 0.4);
        assert!(!check.is_equilibrium());
    }

    #[test]
    fn discrete_zero_profile_verifies_on_discrete_ladder() {
        let inst = gen_ladder(&LadderSpec::discrete(2));
        let zero = StrategyProfile::zeros(&inst);
        let check = verify_equilibrium(&inst, &zero, 1e-9).unwrap();
        assert_eq!(check.max_gap(), 0.0);
    }

    #[test]
    fn infeasible_profile_is_rejected() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let mut profile = StrategyProfile::zeros(&inst);
        profile.x[0][0] = 10.0;
        assert!(matches!(
            verify_equilibrium(&inst, &profile, 1e-6),
            Err(GnepError::InfeasibleProfile(0))
        ));
    }
}
