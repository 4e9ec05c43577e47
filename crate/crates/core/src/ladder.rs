//! Ladder-network instance family and its closed-form equilibrium.
//!
//! The ladder for `F` agents has top nodes `a_1..a_{F+1}`, bottom nodes
//! `b_1..b_{F+1}`, horizontal chains along both rows and one vertical rung
//! per column. Every agent's adversary starts at `a_1`; agent `f` protects
//! `b_{f+1}`. Vertical arcs cost 1, horizontal arcs cost `1 + epsilon`.

use crate::instance::{Agent, Arc, InterdictionInstance, Mode, Network, StrategyProfile};
use crate::subproblems::{centralized_continuous, SubproblemError};

/// Parameters of a ladder instance.
#[derive(Debug, Clone)]
pub struct LadderSpec {
    pub n_agents: usize,
    /// Horizontal arcs cost `1 + epsilon`.
    pub epsilon: f64,
    /// Per-agent budget (same for all agents).
    pub budget: f64,
    /// Initial length of every arc.
    pub d0: f64,
    pub mode: Mode,
    /// Fixed extension of every arc (discrete mode).
    pub extension: f64,
}

impl LadderSpec {
    pub fn continuous(n_agents: usize, epsilon: f64) -> Self {
        LadderSpec {
            n_agents,
            epsilon,
            budget: 1.0,
            d0: 0.0,
            mode: Mode::Continuous,
            extension: 0.0,
        }
    }

    /// Discrete variant with unit costs everywhere (`epsilon = 0`), unit
    /// extensions and unit budgets.
    pub fn discrete(n_agents: usize) -> Self {
        LadderSpec {
            n_agents,
            epsilon: 0.0,
            budget: 1.0,
            d0: 0.0,
            mode: Mode::Discrete,
            extension: 1.0,
        }
    }
}

/// Node id of `a_i` (1-based column `i`).
fn top(i: usize) -> u32 {
    i as u32
}

/// Node id of `b_i` (1-based column `i`).
fn bottom(f: usize, i: usize) -> u32 {
    (f + 1 + i) as u32
}

/// Builds the ladder instance. Arc order: top horizontals left to right,
/// then verticals left to right, then bottom horizontals; for `F = 2` this
/// is the six-node network with arcs (1,2), (2,3), (1,4), (2,5), (3,6),
/// (4,5), (5,6).
pub fn gen_ladder(spec: &LadderSpec) -> InterdictionInstance {
    let f_count = spec.n_agents;
    assert!(f_count >= 1, "ladder needs at least one agent");
    assert!(spec.epsilon >= 0.0, "epsilon must be nonnegative");
    let cols = f_count + 1;
    let mut nodes = Vec::with_capacity(2 * cols);
    for i in 1..=cols {
        nodes.push(top(i));
    }
    for i in 1..=cols {
        nodes.push(bottom(f_count, i));
    }
    let mut arcs = Vec::with_capacity(3 * f_count + 1);
    let mut horizontal = Vec::new();
    for i in 1..cols {
        arcs.push(Arc {
            tail: top(i),
            head: top(i + 1),
            d0: spec.d0,
            e: spec.extension,
        });
        horizontal.push(arcs.len() - 1);
    }
    for i in 1..=cols {
        arcs.push(Arc {
            tail: top(i),
            head: bottom(f_count, i),
            d0: spec.d0,
            e: spec.extension,
        });
    }
    for i in 1..cols {
        arcs.push(Arc {
            tail: bottom(f_count, i),
            head: bottom(f_count, i + 1),
            d0: spec.d0,
            e: spec.extension,
        });
        horizontal.push(arcs.len() - 1);
    }
    let mut costs = vec![1.0; arcs.len()];
    for &a in &horizontal {
        costs[a] = 1.0 + spec.epsilon;
    }
    let agents = (1..=f_count)
        .map(|f| Agent {
            source: top(1),
            target: bottom(f_count, f + 1),
            budget: spec.budget,
            costs: costs.clone(),
        })
        .collect();
    let instance = InterdictionInstance {
        network: Network { nodes, arcs },
        agents,
        mode: spec.mode,
    };
    debug_assert!(instance.validate().is_ok());
    instance
}

/// Arc index of vertical rung `i` (1-based) in the generated arc order:
/// the `n_agents` top horizontals come first.
pub fn vertical_arc(n_agents: usize, i: usize) -> usize {
    n_agents + (i - 1)
}

/// The budget-tight equilibrium of the continuous ladder: agent `f` (1-based)
/// interdicts verticals `1..=f` by `1/(f(f+1))` and vertical `f+1` by
/// `f/(f+1)`, spending exactly 1 and leaving every path at length `F/(F+1)`.
pub fn ladder_equilibrium_construction(n_agents: usize) -> StrategyProfile {
    let m = 3 * n_agents + 1;
    let mut x = vec![vec![0.0; m]; n_agents];
    for f in 1..=n_agents {
        let row = &mut x[f - 1];
        for i in 1..=f {
            row[vertical_arc(n_agents, i)] = 1.0 / (f as f64 * (f + 1) as f64);
        }
        row[vertical_arc(n_agents, f + 1)] = f as f64 / (f + 1) as f64;
    }
    StrategyProfile { x }
}

/// Lower bound on the worst-case price of anarchy certified by the ladder:
/// the feasible centralized construction reaches `F/(2+eps)` per agent while
/// the constructed equilibrium gives `F/(F+1)` per agent.
#[derive(Debug, Clone, Copy)]
pub struct PoaBound {
    pub ratio: f64,
    /// True when the ratio is below 1 and therefore carries no information.
    pub vacuous: bool,
    pub centralized_value: f64,
    pub construction_welfare: f64,
}

/// Evaluates the ladder bound `(F+1)/(2+eps)` and cross-checks that the
/// centralized optimum dominates the feasible construction's welfare
/// `F*F/(2+eps)`.
pub fn poa_lower_bound_ladder(n_agents: usize, epsilon: f64) -> Result<PoaBound, SubproblemError> {
    let ratio = (n_agents as f64 + 1.0) / (2.0 + epsilon);
    let construction_welfare = (n_agents as f64) * (n_agents as f64) / (2.0 + epsilon);
    let instance = gen_ladder(&LadderSpec::continuous(n_agents, epsilon));
    let (centralized_value, _) = centralized_continuous(&instance)?;
    debug_assert!(centralized_value >= construction_welfare - 1e-6);
    Ok(PoaBound {
        ratio,
        vacuous: ratio < 1.0,
        centralized_value,
        construction_welfare,
    })
}
