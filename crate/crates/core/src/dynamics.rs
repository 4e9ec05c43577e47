//! Gauss-Seidel best-response dynamics, the regularized variant, cycle
//! detection and multi-start equilibrium search.
//!
//! One outer iteration sweeps the agents in a fixed order; each agent solves
//! its subproblem with everyone else held at the freshest values and adopts
//! the answer only on a strict payoff improvement. Termination compares
//! consecutive outer iterates in the infinity norm over all `(x, y)` blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gnep::{verify_equilibrium, GnepError};
use crate::instance::{
    aftermath_lengths, feasible, potentials, social_welfare, DualProfile, InstanceError,
    InterdictionInstance, Mode, StrategyProfile, Topology,
};
use crate::subproblems::{
    best_response_continuous, best_response_discrete, best_response_regularized,
    RegularizedSubproblem, SubproblemError,
};

/// Strict-improvement margin for payoff comparisons.
const IMPROVE_TOL: f64 = 1e-12;

/// Proximity threshold for revisited continuous iterates.
const CYCLE_TOL: f64 = 1e-9;

/// Regularization weight tried when the plain iteration fails to converge.
pub const FALLBACK_TAU: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct DynamicsConfig {
    /// Termination tolerance on consecutive outer iterates.
    pub epsilon: f64,
    /// Regularization weight; zero runs the plain best-response iteration.
    pub tau: f64,
    pub max_outer: usize,
    pub agent_order: Vec<usize>,
    pub initial_profile: StrategyProfile,
}

impl DynamicsConfig {
    /// Plain iteration from the zero profile in natural agent order.
    pub fn naive(instance: &InterdictionInstance) -> Self {
        DynamicsConfig {
            epsilon: match instance.mode {
                Mode::Continuous => 1e-6,
                Mode::Discrete => 0.5,
            },
            tau: 0.0,
            max_outer: 1000,
            agent_order: (0..instance.n_agents()).collect(),
            initial_profile: StrategyProfile::zeros(instance),
        }
    }

    /// Regularized iteration (continuous instances).
    pub fn regularized(instance: &InterdictionInstance, tau: f64) -> Self {
        DynamicsConfig {
            tau,
            ..DynamicsConfig::naive(instance)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsStatus {
    Converged,
    CycleDetected,
    IterationLimit,
}

/// One inner step of the sweep. `x_row` is the acting agent's interdiction
/// vector after the step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub iteration: usize,
    pub agent: usize,
    pub payoff_before: f64,
    pub payoff_after: f64,
    pub updated: bool,
    pub x_row: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DynamicsTrace {
    pub mode: Mode,
    /// Outer iterates, starting with the initial profile.
    pub iterates: Vec<StrategyProfile>,
    pub duals: Vec<DualProfile>,
    /// Per-iterate agent payoffs.
    pub objectives: Vec<Vec<f64>>,
    pub steps: Vec<StepRecord>,
    pub status: DynamicsStatus,
    pub cycle: Option<(usize, usize)>,
    pub outer_iterations: usize,
}

impl DynamicsTrace {
    pub fn final_profile(&self) -> &StrategyProfile {
        self.iterates.last().expect("trace holds the initial iterate")
    }

    /// Line-oriented replay records: iteration, agent, payoffs before and
    /// after, update flag, and the acting agent's row.
    pub fn render_lines(&self) -> String {
        let mut out = String::from("iteration\tagent\tbefore\tafter\tupdated\tx_row\n");
        for step in &self.steps {
            let row = step
                .x_row
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!(
                "{}\t{}\t{:?}\t{:?}\t{}\t{}\n",
                step.iteration,
                step.agent,
                step.payoff_before,
                step.payoff_after,
                u8::from(step.updated),
                row
            ));
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid dynamics configuration: {0}")]
    BadConfig(String),
    #[error("subproblem failed at iteration {iteration}, agent {agent}: {source}")]
    Aborted {
        iteration: usize,
        agent: usize,
        source: SubproblemError,
        partial: Box<DynamicsTrace>,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Subproblem(#[from] SubproblemError),
    #[error(transparent)]
    Gnep(#[from] GnepError),
}

fn validate_config(
    instance: &InterdictionInstance,
    config: &DynamicsConfig,
) -> Result<(), DynamicsError> {
    if !(config.epsilon > 0.0) {
        return Err(DynamicsError::BadConfig("epsilon must be positive".into()));
    }
    if instance.mode == Mode::Discrete && config.epsilon >= 1.0 {
        return Err(DynamicsError::BadConfig(
            "discrete termination needs epsilon < 1".into(),
        ));
    }
    if instance.mode == Mode::Discrete && config.tau != 0.0 {
        return Err(DynamicsError::BadConfig(
            "regularization applies to continuous instances only".into(),
        ));
    }
    if config.tau < 0.0 {
        return Err(DynamicsError::BadConfig("tau must be nonnegative".into()));
    }
    if config.max_outer == 0 {
        return Err(DynamicsError::BadConfig("max_outer must be positive".into()));
    }
    let mut seen = vec![false; instance.n_agents()];
    if config.agent_order.len() != instance.n_agents() {
        return Err(DynamicsError::BadConfig("agent_order length mismatch".into()));
    }
    for &f in &config.agent_order {
        if f >= seen.len() || seen[f] {
            return Err(DynamicsError::BadConfig(
                "agent_order must be a permutation".into(),
            ));
        }
        seen[f] = true;
    }
    config.initial_profile.check_shape(instance)?;
    for row in &config.initial_profile.x {
        for &v in row {
            let ok = match instance.mode {
                Mode::Continuous => v >= 0.0,
                Mode::Discrete => v == 0.0 || v == 1.0,
            };
            if !ok {
                return Err(DynamicsError::BadConfig(
                    "initial profile entries must be mode-valid".into(),
                ));
            }
        }
    }
    Ok(())
}

fn norm_inf_diff(a: &StrategyProfile, b: &StrategyProfile, ya: &DualProfile, yb: &DualProfile) -> f64 {
    let mut worst = 0.0_f64;
    for (ra, rb) in a.x.iter().zip(&b.x) {
        for (&va, &vb) in ra.iter().zip(rb) {
            worst = worst.max((va - vb).abs());
        }
    }
    for (ra, rb) in ya.y.iter().zip(&yb.y) {
        for (&va, &vb) in ra.iter().zip(rb) {
            worst = worst.max((va - vb).abs());
        }
    }
    worst
}

fn payoffs_now(
    instance: &InterdictionInstance,
    topo: &Topology,
    profile: &StrategyProfile,
) -> Result<Vec<f64>, InstanceError> {
    let lengths = aftermath_lengths(instance, profile)?;
    (0..instance.n_agents())
        .map(|f| crate::instance::shortest_path_with(instance, topo, &lengths, f).map(|p| p.0))
        .collect()
}

/// Gauss-Seidel iteration (plain when `tau = 0`, proximal otherwise).
///
/// The update guard adopts a subproblem answer only when it strictly beats
/// the agent's current obstruction value, except that an agent holding a
/// budget-infeasible vector always adopts (so infeasible warm starts heal on
/// the first sweep). The proximal anchor pairs the agent's current efforts
/// with freshly computed potentials, so a fixed point of the sweep is a
/// per-agent best response.
fn run(
    instance: &InterdictionInstance,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace, DynamicsError> {
    validate_config(instance, config)?;
    let topo = Topology::new(&instance.network);
    let mut x = config.initial_profile.clone();
    let mut y = potentials(instance, &x)?;

    let mut trace = DynamicsTrace {
        mode: instance.mode,
        iterates: vec![x.clone()],
        duals: vec![y.clone()],
        objectives: vec![payoffs_now(instance, &topo, &x)?],
        steps: Vec::new(),
        status: DynamicsStatus::IterationLimit,
        cycle: None,
        outer_iterations: 0,
    };

    for k in 1..=config.max_outer {
        for &f in &config.agent_order {
            let lengths = aftermath_lengths(instance, &x)?;
            let before =
                crate::instance::shortest_path_with(instance, &topo, &lengths, f)?.0;
            let feasible_now = feasible(instance, &x, f)?;

            let step = (|| -> Result<(f64, Vec<f64>, Option<Vec<f64>>), SubproblemError> {
                match (instance.mode, config.tau > 0.0) {
                    (Mode::Discrete, _) => {
                        let br = best_response_discrete(instance, &x, f)?;
                        Ok((br.value, br.x, None))
                    }
                    (Mode::Continuous, false) => {
                        let br = best_response_continuous(instance, &x, f)?;
                        Ok((br.value, br.x, Some(br.y)))
                    }
                    (Mode::Continuous, true) => {
                        // Anchor at the current efforts with fresh potentials.
                        let dist = topo.dijkstra(
                            &lengths,
                            topo.node_index[&instance.agents[f].source],
                            false,
                        );
                        let cap = crate::instance::big_m(instance);
                        let mut anchor = x.x[f].clone();
                        anchor.extend(dist.iter().map(|&d| d.min(cap)));
                        let sub = RegularizedSubproblem::build(
                            instance,
                            &x,
                            f,
                            &anchor,
                            config.tau,
                        )?;
                        let br = best_response_regularized(&sub, instance)?;
                        Ok((br.value, br.x, Some(br.y)))
                    }
                }
            })();
            let (value, new_x, new_y) = match step {
                Ok(v) => v,
                Err(source) => {
                    trace.outer_iterations = k - 1;
                    return Err(DynamicsError::Aborted {
                        iteration: k,
                        agent: f,
                        source,
                        partial: Box::new(trace),
                    });
                }
            };

            let updated = !feasible_now || value > before + IMPROVE_TOL;
            if updated {
                x.x[f] = new_x;
                match new_y {
                    Some(yrow) => y.y[f] = yrow,
                    None => {
                        let lengths = aftermath_lengths(instance, &x)?;
                        let dist = topo.dijkstra(
                            &lengths,
                            topo.node_index[&instance.agents[f].source],
                            false,
                        );
                        let cap = crate::instance::big_m(instance);
                        y.y[f] = dist.iter().map(|&d| d.min(cap)).collect();
                    }
                }
            }
            trace.steps.push(StepRecord {
                iteration: k,
                agent: f,
                payoff_before: before,
                payoff_after: if updated { value } else { before },
                updated,
                x_row: x.x[f].clone(),
            });
        }

        trace.iterates.push(x.clone());
        trace.duals.push(y.clone());
        trace.objectives.push(payoffs_now(instance, &topo, &x)?);
        trace.outer_iterations = k;

        let prev = trace.iterates.len() - 2;
        let diff = norm_inf_diff(
            &trace.iterates[prev + 1],
            &trace.iterates[prev],
            &trace.duals[prev + 1],
            &trace.duals[prev],
        );
        if diff <= config.epsilon {
            trace.status = DynamicsStatus::Converged;
            return Ok(trace);
        }
        if let Some(span) = find_repeat(&trace, true) {
            trace.status = DynamicsStatus::CycleDetected;
            trace.cycle = Some(span);
            return Ok(trace);
        }
    }
    trace.status = DynamicsStatus::IterationLimit;
    Ok(trace)
}

/// First revisited outer iterate `(j, k)`, if any. Discrete states repeat
/// exactly; continuous iterates count as revisited within a tight proximity
/// threshold. The newest consecutive pair is skipped, since equality there
/// is convergence, not cycling.
fn find_repeat(trace: &DynamicsTrace, newest_only: bool) -> Option<(usize, usize)> {
    let iterates = &trace.iterates;
    let len = iterates.len();
    if len < 3 {
        return None;
    }
    let matches = |j: usize, k: usize| -> bool {
        match trace.mode {
            Mode::Discrete => iterates[j].x == iterates[k].x,
            Mode::Continuous => {
                norm_inf_diff(&iterates[j], &iterates[k], &trace.duals[j], &trace.duals[k])
                    <= CYCLE_TOL
            }
        }
    };
    if newest_only {
        let k = len - 1;
        for j in 0..k.saturating_sub(1) {
            if matches(j, k) {
                return Some((j, k));
            }
        }
        None
    } else {
        for k in 2..len {
            for j in 0..k - 1 {
                if matches(j, k) {
                    return Some((j, k));
                }
            }
        }
        None
    }
}

/// Scans a finished trace for a repeated state. Converged traces report
/// none.
pub fn detect_cycle(trace: &DynamicsTrace) -> Option<(usize, usize)> {
    if trace.status == DynamicsStatus::Converged {
        return None;
    }
    find_repeat(trace, false)
}

/// Plain Gauss-Seidel (`tau` must be zero).
pub fn gauss_seidel(
    instance: &InterdictionInstance,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace, DynamicsError> {
    if config.tau != 0.0 {
        return Err(DynamicsError::BadConfig(
            "plain iteration requires tau = 0".into(),
        ));
    }
    run(instance, config)
}

/// Regularized Gauss-Seidel (continuous instances, `tau > 0`).
pub fn regularized_gauss_seidel(
    instance: &InterdictionInstance,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace, DynamicsError> {
    if instance.mode != Mode::Continuous {
        return Err(DynamicsError::BadConfig(
            "regularized iteration requires a continuous instance".into(),
        ));
    }
    if !(config.tau > 0.0) {
        return Err(DynamicsError::BadConfig(
            "regularized iteration requires tau > 0".into(),
        ));
    }
    run(instance, config)
}

/// The driver strategy used throughout the experiments: try the plain
/// iteration first and, should it fail to converge on a continuous
/// instance, rerun regularized from the same start.
pub fn solve_with_fallback(
    instance: &InterdictionInstance,
    config: &DynamicsConfig,
) -> Result<DynamicsTrace, DynamicsError> {
    if config.tau > 0.0 {
        return run(instance, config);
    }
    let first = run(instance, config)?;
    if first.status == DynamicsStatus::Converged || instance.mode == Mode::Discrete {
        return Ok(first);
    }
    let retry = DynamicsConfig {
        tau: FALLBACK_TAU,
        ..config.clone()
    };
    run(instance, &retry)
}

/// One verified equilibrium found by the search.
#[derive(Debug, Clone)]
pub struct FoundEquilibrium {
    pub profile: StrategyProfile,
    pub payoffs: Vec<f64>,
    pub welfare: f64,
    pub max_gap: f64,
}

#[derive(Debug, Clone)]
pub struct MultiStartReport {
    /// Distinct verified equilibria in canonical order.
    pub equilibria: Vec<FoundEquilibrium>,
    pub total_runs: usize,
    pub converged_runs: usize,
    /// Runs that ended without convergence (recorded, excluded from output).
    pub unconverged_runs: usize,
    /// Converged runs whose endpoint failed equilibrium verification.
    pub rejected_runs: usize,
}

fn random_feasible_profile(
    instance: &InterdictionInstance,
    rng: &mut ChaCha8Rng,
) -> StrategyProfile {
    let m = instance.n_arcs();
    let mut profile = StrategyProfile::zeros(instance);
    for (f, agent) in instance.agents.iter().enumerate() {
        match instance.mode {
            Mode::Continuous => {
                let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
                let cost: f64 = raw.iter().zip(&agent.costs).map(|(&x, &c)| x * c).sum();
                if cost > 0.0 {
                    let scale = rng.random::<f64>() * agent.budget / cost;
                    profile.x[f] = raw.iter().map(|&v| v * scale).collect();
                }
            }
            Mode::Discrete => {
                let mut spend = 0.0;
                let mut order: Vec<usize> = (0..m).collect();
                for i in (1..order.len()).rev() {
                    let j = rng.random_range(0..=i);
                    order.swap(i, j);
                }
                for a in order {
                    if rng.random::<f64>() < 0.5
                        && spend + agent.costs[a] <= agent.budget
                    {
                        profile.x[f][a] = 1.0;
                        spend += agent.costs[a];
                    }
                }
            }
        }
    }
    profile
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

/// Rounds a profile to six decimals for deduplication keys.
fn rounding_key(profile: &StrategyProfile) -> Vec<Vec<i64>> {
    profile
        .x
        .iter()
        .map(|row| row.iter().map(|v| (v * 1e6).round() as i64).collect())
        .collect()
}

/// Runs the dynamics from `n_starts` starting profiles crossed with
/// `n_orders` agent orders (the first start is `base` or the zero profile;
/// the first order is natural). Converged endpoints are verified at the
/// `1e-6` gap tolerance, deduplicated after `1e-6` rounding and returned in
/// canonical order.
pub fn multi_start(
    instance: &InterdictionInstance,
    n_starts: usize,
    n_orders: usize,
    seed: u64,
    base: Option<&StrategyProfile>,
) -> Result<MultiStartReport, DynamicsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(n_starts.max(1));
    starts.push(match base {
        Some(p) => p.clone(),
        None => StrategyProfile::zeros(instance),
    });
    while starts.len() < n_starts.max(1) {
        starts.push(random_feasible_profile(instance, &mut rng));
    }
    let mut orders = Vec::with_capacity(n_orders.max(1));
    orders.push((0..instance.n_agents()).collect::<Vec<_>>());
    while orders.len() < n_orders.max(1) {
        orders.push(random_permutation(instance.n_agents(), &mut rng));
    }

    let mut report = MultiStartReport {
        equilibria: Vec::new(),
        total_runs: 0,
        converged_runs: 0,
        unconverged_runs: 0,
        rejected_runs: 0,
    };
    let mut seen = std::collections::BTreeSet::new();
    for start in &starts {
        for order in &orders {
            report.total_runs += 1;
            let config = DynamicsConfig {
                epsilon: match instance.mode {
                    Mode::Continuous => 1e-8,
                    Mode::Discrete => 0.5,
                },
                tau: 0.0,
                max_outer: 1000,
                agent_order: order.clone(),
                initial_profile: start.clone(),
            };
            let trace = solve_with_fallback(instance, &config)?;
            if trace.status != DynamicsStatus::Converged {
                report.unconverged_runs += 1;
                continue;
            }
            report.converged_runs += 1;
            let profile = trace.final_profile().clone();
            let check = verify_equilibrium(instance, &profile, 1e-6)?;
            if !check.is_equilibrium() {
                report.rejected_runs += 1;
                continue;
            }
            let key = rounding_key(&profile);
            if seen.insert(key) {
                let welfare = social_welfare(instance, &profile)?;
                report.equilibria.push(FoundEquilibrium {
                    profile,
                    payoffs: check.payoffs.clone(),
                    welfare,
                    max_gap: check.max_gap(),
                });
            }
        }
    }
    report
        .equilibria
        .sort_by(|a, b| rounding_key(&a.profile).cmp(&rounding_key(&b.profile)));
    Ok(report)
}
