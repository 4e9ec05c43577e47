//! Instance model for decentralized shortest-path interdiction games.
//!
//! A game instance couples a directed network, carrying per-arc initial
//! lengths and fixed extensions, with a set of interdicting agents. Each
//! agent lengthens arcs (continuously, or by toggling the fixed extension)
//! subject to a budget, trying to maximize the length of the shortest
//! source-target path its adversary can traverse in the aftermath network.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for feasibility and equality checks on continuous data.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Interdiction mode of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Continuous,
    Discrete,
}

/// Directed arc with initial length `d0` and fixed extension `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: u32,
    pub head: u32,
    pub d0: f64,
    pub e: f64,
}

/// Directed network over integer node ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub nodes: Vec<u32>,
    pub arcs: Vec<Arc>,
}

/// An interdicting agent: adversary source/target pair, per-arc interdiction
/// costs (indexed like `Network::arcs`) and a total budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub source: u32,
    pub target: u32,
    pub budget: f64,
    pub costs: Vec<f64>,
}

/// A full interdiction game instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InterdictionInstance {
    pub network: Network,
    pub agents: Vec<Agent>,
    pub mode: Mode,
}

/// One interdiction vector per agent, indexed `[agent][arc]`.
///
/// Budget feasibility is deliberately not an invariant: infeasible profiles
/// are representable and rejected by [`feasible`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub x: Vec<Vec<f64>>,
}

/// Node potentials per agent, indexed `[agent][node]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualProfile {
    pub y: Vec<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance has no nodes")]
    EmptyNetwork,
    #[error("instance has no agents")]
    NoAgents,
    #[error("duplicate node id {0}")]
    DuplicateNode(u32),
    #[error("arc ({0}, {1}) references an unknown node")]
    UnknownNode(u32, u32),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(u32, u32),
    #[error("arc ({0}, {1}) has negative initial length")]
    NegativeLength(u32, u32),
    #[error("arc ({0}, {1}) has negative extension")]
    NegativeExtension(u32, u32),
    #[error("agent {0}: source equals target")]
    DegeneratePair(usize),
    #[error("agent {0}: unknown source or target node")]
    UnknownEndpoint(usize),
    #[error("agent {0}: cost vector has {1} entries, expected {2}")]
    CostDimension(usize, usize, usize),
    #[error("agent {0}: nonpositive cost on arc {1}")]
    NonpositiveCost(usize, usize),
    #[error("agent {0}: nonpositive budget")]
    NonpositiveBudget(usize),
    #[error("agent {0}: target unreachable from source")]
    Unreachable(usize),
    #[error("profile shape {got_agents}x{got_arcs} does not match instance {want_agents}x{want_arcs}")]
    ProfileShape {
        got_agents: usize,
        got_arcs: usize,
        want_agents: usize,
        want_arcs: usize,
    },
    #[error("agent index {0} out of range ({1} agents)")]
    AgentIndex(usize, usize),
    #[error("path enumeration exceeded cap {0}")]
    PathCapExceeded(usize),
}

impl StrategyProfile {
    /// All-zero profile shaped for `instance`.
    pub fn zeros(instance: &InterdictionInstance) -> Self {
        StrategyProfile {
            x: vec![vec![0.0; instance.network.arcs.len()]; instance.agents.len()],
        }
    }

    pub fn check_shape(&self, instance: &InterdictionInstance) -> Result<(), InstanceError> {
        let want_agents = instance.agents.len();
        let want_arcs = instance.network.arcs.len();
        let got_agents = self.x.len();
        let got_arcs = self.x.iter().map(|row| row.len()).max().unwrap_or(0);
        if got_agents != want_agents || self.x.iter().any(|row| row.len() != want_arcs) {
            return Err(InstanceError::ProfileShape {
                got_agents,
                got_arcs,
                want_agents,
                want_arcs,
            });
        }
        Ok(())
    }
}

impl InterdictionInstance {
    pub fn n_nodes(&self) -> usize {
        self.network.nodes.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.network.arcs.len()
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    /// Structural validation. Returns human-readable warnings for accepted
    /// relaxations (zero initial lengths, discrete budgets too small to
    /// interdict any arc).
    pub fn validate(&self) -> Result<Vec<String>, InstanceError> {
        if self.network.nodes.is_empty() {
            return Err(InstanceError::EmptyNetwork);
        }
        if self.agents.is_empty() {
            return Err(InstanceError::NoAgents);
        }
        let mut index: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, &v) in self.network.nodes.iter().enumerate() {
            if index.insert(v, i).is_some() {
                return Err(InstanceError::DuplicateNode(v));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut warnings = Vec::new();
        for arc in &self.network.arcs {
            if !index.contains_key(&arc.tail) || !index.contains_key(&arc.head) {
                return Err(InstanceError::UnknownNode(arc.tail, arc.head));
            }
            if !seen.insert((arc.tail, arc.head)) {
                return Err(InstanceError::DuplicateArc(arc.tail, arc.head));
            }
            if !(arc.d0 >= 0.0) {
                return Err(InstanceError::NegativeLength(arc.tail, arc.head));
            }
            if !(arc.e >= 0.0) {
                return Err(InstanceError::NegativeExtension(arc.tail, arc.head));
            }
            if arc.d0 == 0.0 {
                warnings.push(format!(
                    "arc ({}, {}) has zero initial length",
                    arc.tail, arc.head
                ));
            }
        }
        let topo = Topology::new(&self.network);
        for (f, agent) in self.agents.iter().enumerate() {
            if agent.source == agent.target {
                return Err(InstanceError::DegeneratePair(f));
            }
            if !index.contains_key(&agent.source) || !index.contains_key(&agent.target) {
                return Err(InstanceError::UnknownEndpoint(f));
            }
            if agent.costs.len() != self.network.arcs.len() {
                return Err(InstanceError::CostDimension(
                    f,
                    agent.costs.len(),
                    self.network.arcs.len(),
                ));
            }
            for (a, &c) in agent.costs.iter().enumerate() {
                if !(c > 0.0) {
                    return Err(InstanceError::NonpositiveCost(f, a));
                }
            }
            if !(agent.budget > 0.0) {
                return Err(InstanceError::NonpositiveBudget(f));
            }
            if !topo.reachable(index[&agent.source], index[&agent.target]) {
                return Err(InstanceError::Unreachable(f));
            }
            if self.mode == Mode::Discrete {
                let min_cost = agent
                    .costs
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                if agent.budget + FEASIBILITY_TOL < min_cost {
                    warnings.push(format!(
                        "agent {f}: budget {} cannot interdict any single arc",
                        agent.budget
                    ));
                }
            }
        }
        Ok(warnings)
    }
}

/// Arc-indexed adjacency with a node-id lookup, built once per instance and
/// reused by the path routines.
#[derive(Debug, Clone)]
pub(crate) struct Topology {
    pub node_index: BTreeMap<u32, usize>,
    /// Outgoing `(arc index, head node index)` per node index.
    pub out: Vec<Vec<(usize, usize)>>,
    /// Incoming `(arc index, tail node index)` per node index.
    pub inc: Vec<Vec<(usize, usize)>>,
    pub arc_ends: Vec<(usize, usize)>,
}

impl Topology {
    pub fn new(network: &Network) -> Self {
        let node_index: BTreeMap<u32, usize> = network
            .nodes
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let n = network.nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut arc_ends = Vec::with_capacity(network.arcs.len());
        for (a, arc) in network.arcs.iter().enumerate() {
            let u = node_index[&arc.tail];
            let v = node_index[&arc.head];
            out[u].push((a, v));
            inc[v].push((a, u));
            arc_ends.push((u, v));
        }
        // Deterministic neighbor order: ascending head/tail node id.
        for u in 0..n {
            out[u].sort_by_key(|&(a, v)| (network.nodes[v], a));
            inc[u].sort_by_key(|&(a, t)| (network.nodes[t], a));
        }
        Topology {
            node_index,
            out,
            inc,
            arc_ends,
        }
    }

    fn reachable(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.out.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            for &(_, v) in &self.out[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    /// Single-source shortest distances under the given arc lengths
    /// (label-setting; lengths must be nonnegative). `reversed` walks
    /// incoming arcs instead, giving distances *to* the source.
    pub fn dijkstra(&self, lengths: &[f64], source: usize, reversed: bool) -> Vec<f64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;

        #[derive(PartialEq)]
        struct Entry(f64, usize);
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
            }
        }

        let n = self.out.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse(Entry(0.0, source)));
        while let Some(Reverse(Entry(d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            let adj = if reversed { &self.inc[u] } else { &self.out[u] };
            for &(a, v) in adj {
                if done[v] {
                    continue;
                }
                let nd = d + lengths[a];
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse(Entry(nd, v)));
                }
            }
        }
        dist
    }
}

/// Per-arc lengths of the aftermath network under `profile`.
///
/// Continuous mode adds every agent's effort to the initial length; discrete
/// mode adds the fixed extension once if any agent interdicts the arc.
pub fn aftermath_lengths(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
) -> Result<Vec<f64>, InstanceError> {
    profile.check_shape(instance)?;
    let m = instance.n_arcs();
    let mut lengths = Vec::with_capacity(m);
    for (a, arc) in instance.network.arcs.iter().enumerate() {
        let len = match instance.mode {
            Mode::Continuous => {
                let mut total = arc.d0;
                for row in &profile.x {
                    total += row[a];
                }
                total
            }
            Mode::Discrete => {
                let hit = profile
                    .x
                    .iter()
                    .map(|row| row[a])
                    .fold(0.0_f64, f64::max);
                arc.d0 + arc.e * hit
            }
        };
        lengths.push(len);
    }
    Ok(lengths)
}

/// Shortest aftermath path length and one witness path (as node ids) for the
/// given agent. The length equals the agent's obstruction value; witness ties
/// are broken toward the lexicographically smallest node sequence.
pub fn shortest_path(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<(f64, Vec<u32>), InstanceError> {
    let lengths = aftermath_lengths(instance, profile)?;
    let topo = Topology::new(&instance.network);
    shortest_path_with(instance, &topo, &lengths, agent_index)
}

pub(crate) fn shortest_path_with(
    instance: &InterdictionInstance,
    topo: &Topology,
    lengths: &[f64],
    agent_index: usize,
) -> Result<(f64, Vec<u32>), InstanceError> {
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(InstanceError::AgentIndex(agent_index, instance.agents.len()))?;
    let s = topo.node_index[&agent.source];
    let t = topo.node_index[&agent.target];
    let dist = topo.dijkstra(lengths, s, false);
    if !dist[t].is_finite() {
        return Err(InstanceError::Unreachable(agent_index));
    }
    let back = topo.dijkstra(lengths, t, true);
    let total = dist[t];
    let path = witness_path(instance, topo, lengths, &dist, &back, s, t, total);
    Ok((total, path))
}

/// Depth-first walk over relaxation-certified arcs in ascending node-id
/// order; the first complete path found is the witness. Certified arcs
/// satisfy `dist[u] + len == dist[v]` bitwise, so the walk stays on exact
/// shortest paths; the loose `dist + back` screen only prunes excursions.
#[allow(clippy::too_many_arguments)]
fn witness_path(
    instance: &InterdictionInstance,
    topo: &Topology,
    lengths: &[f64],
    dist: &[f64],
    back: &[f64],
    s: usize,
    t: usize,
    total: f64,
) -> Vec<u32> {
    let slack = 1e-12 * (1.0 + total.abs());
    let mut visited = vec![false; topo.out.len()];
    visited[s] = true;
    fn dfs(
        topo: &Topology,
        lengths: &[f64],
        dist: &[f64],
        back: &[f64],
        visited: &mut [bool],
        path: &mut Vec<usize>,
        u: usize,
        t: usize,
        total: f64,
        slack: f64,
    ) -> bool {
        if u == t {
            return true;
        }
        for &(a, v) in &topo.out[u] {
            if visited[v] || dist[u] + lengths[a] != dist[v] {
                continue;
            }
            if dist[v] + back[v] > total + slack {
                continue;
            }
            visited[v] = true;
            path.push(v);
            if dfs(topo, lengths, dist, back, visited, path, v, t, total, slack) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut idx_path = vec![s];
    let found = dfs(
        topo,
        lengths,
        dist,
        back,
        &mut visited,
        &mut idx_path,
        s,
        t,
        total,
        slack,
    );
    debug_assert!(found, "witness reconstruction failed");
    idx_path
        .iter()
        .map(|&i| instance.network.nodes[i])
        .collect()
}

/// Utilitarian social welfare: sum of all agents' shortest-path lengths.
pub fn social_welfare(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
) -> Result<f64, InstanceError> {
    let lengths = aftermath_lengths(instance, profile)?;
    let topo = Topology::new(&instance.network);
    let mut total = 0.0;
    for f in 0..instance.n_agents() {
        total += shortest_path_with(instance, &topo, &lengths, f)?.0;
    }
    Ok(total)
}

/// Upper bound on any aftermath path length, used to box dual potentials.
pub fn big_m(instance: &InterdictionInstance) -> f64 {
    match instance.mode {
        Mode::Continuous => {
            let sum_d0: f64 = instance.network.arcs.iter().map(|a| a.d0).sum();
            let mut max_ratio: f64 = 0.0;
            for agent in &instance.agents {
                for &c in &agent.costs {
                    max_ratio = max_ratio.max(agent.budget / c);
                }
            }
            sum_d0
                + instance.n_arcs() as f64 * instance.n_agents() as f64 * max_ratio
        }
        Mode::Discrete => instance.network.arcs.iter().map(|a| a.d0 + a.e).sum(),
    }
}

/// Budget- and mode-feasibility of agent `agent_index`'s row of the profile.
pub fn feasible(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
    agent_index: usize,
) -> Result<bool, InstanceError> {
    profile.check_shape(instance)?;
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(InstanceError::AgentIndex(agent_index, instance.agents.len()))?;
    let row = &profile.x[agent_index];
    for &v in row {
        match instance.mode {
            Mode::Continuous => {
                if v < -FEASIBILITY_TOL {
                    return Ok(false);
                }
            }
            Mode::Discrete => {
                if (v - 0.0).abs() > FEASIBILITY_TOL && (v - 1.0).abs() > FEASIBILITY_TOL {
                    return Ok(false);
                }
            }
        }
    }
    let spend: f64 = row.iter().zip(&agent.costs).map(|(&x, &c)| c * x).sum();
    Ok(spend <= agent.budget + FEASIBILITY_TOL)
}

/// All simple source-target paths of an agent, as node-id sequences in
/// lexicographic order. Errors once more than `cap` paths are found; meant
/// for brute-force oracles only.
pub fn enumerate_paths(
    instance: &InterdictionInstance,
    agent_index: usize,
    cap: usize,
) -> Result<Vec<Vec<u32>>, InstanceError> {
    let agent = instance
        .agents
        .get(agent_index)
        .ok_or(InstanceError::AgentIndex(agent_index, instance.agents.len()))?;
    let topo = Topology::new(&instance.network);
    let s = topo.node_index[&agent.source];
    let t = topo.node_index[&agent.target];
    let mut paths = Vec::new();
    let mut visited = vec![false; instance.n_nodes()];
    let mut stack = vec![s];
    visited[s] = true;
    fn dfs(
        topo: &Topology,
        visited: &mut [bool],
        stack: &mut Vec<usize>,
        u: usize,
        t: usize,
        cap: usize,
        paths: &mut Vec<Vec<usize>>,
    ) -> Result<(), InstanceError> {
        if u == t {
            if paths.len() >= cap {
                return Err(InstanceError::PathCapExceeded(cap));
            }
            paths.push(stack.clone());
            return Ok(());
        }
        for &(_, v) in &topo.out[u] {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            stack.push(v);
            dfs(topo, visited, stack, v, t, cap, paths)?;
            stack.pop();
            visited[v] = false;
        }
        Ok(())
    }
    dfs(&topo, &mut visited, &mut stack, s, t, cap, &mut paths)?;
    Ok(paths
        .into_iter()
        .map(|p| p.iter().map(|&i| instance.network.nodes[i]).collect())
        .collect())
}

/// Length of a node-id path under the given per-arc lengths, folded left to
/// right (the same association the label-setting method uses). `None` if a
/// hop has no matching arc.
pub fn path_length(
    instance: &InterdictionInstance,
    lengths: &[f64],
    path: &[u32],
) -> Option<f64> {
    let mut by_pair: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (a, arc) in instance.network.arcs.iter().enumerate() {
        by_pair.insert((arc.tail, arc.head), a);
    }
    let mut total = 0.0;
    for hop in path.windows(2) {
        let a = *by_pair.get(&(hop[0], hop[1]))?;
        total += lengths[a];
    }
    Some(total)
}

/// Optimal dual potentials for every agent: per-node shortest distances from
/// the agent's source, capped at the instance's big-M bound.
pub fn potentials(
    instance: &InterdictionInstance,
    profile: &StrategyProfile,
) -> Result<DualProfile, InstanceError> {
    let lengths = aftermath_lengths(instance, profile)?;
    let topo = Topology::new(&instance.network);
    let cap = big_m(instance);
    let mut y = Vec::with_capacity(instance.n_agents());
    for agent in &instance.agents {
        let s = topo.node_index[&agent.source];
        let dist = topo.dijkstra(&lengths, s, false);
        y.push(dist.iter().map(|&d| d.min(cap)).collect());
    }
    Ok(DualProfile { y })
}
