//! Seeded random instance generator.
//!
//! Vertices are fixed up front; the arc set is populated by drawing short
//! source-target paths for the agents (guaranteeing connectivity of every
//! pair) and then filling with uniform random arcs until the requested
//! density is met exactly. Costs, initial lengths and budgets come from the
//! uniform ranges used throughout the experiments. All draws go through a
//! ChaCha8 stream seeded from `seed`, so a spec regenerates byte-identical
//! instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Agent, Arc, InterdictionInstance, Mode, Network};

#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub n_vertices: usize,
    /// Arcs divided by the maximum possible `|V| (|V| - 1)`.
    pub density: f64,
    /// Explicit agent count; when absent one is drawn from `(0, |V|/2)`.
    pub n_agents: Option<usize>,
    pub seed: u64,
    pub mode: Mode,
    /// All agents share one source-target pair.
    pub common_pair: bool,
    /// Draw initial lengths and extensions as integers.
    pub integral_lengths: bool,
    pub cost_range: (f64, f64),
    pub d0_range: (f64, f64),
    /// Budget as a fraction of the agent's total arc cost.
    pub budget_fraction: (f64, f64),
    /// Extension range (discrete mode).
    pub extension_range: (f64, f64),
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            n_vertices: 10,
            density: 0.5,
            n_agents: None,
            seed: 0,
            mode: Mode::Continuous,
            common_pair: false,
            integral_lengths: false,
            cost_range: (1.0, 5.0),
            d0_range: (1.0, 5.0),
            budget_fraction: (0.1, 0.5),
            extension_range: (1.0, 3.0),
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("density {0} outside (0, 1]")]
    BadDensity(f64),
    #[error("target arc count {target} cannot connect {pairs} source-target pairs")]
    DensityTooLow { target: usize, pairs: usize },
    #[error("agent count {0} must be at least 1")]
    NoAgents(usize),
}

/// Generates the instance described by `spec`. Deterministic in the seed.
pub fn gen_random(spec: &RandomSpec) -> Result<InterdictionInstance, GenError> {
    let n = spec.n_vertices;
    if n < 2 {
        return Err(GenError::TooFewVertices(n));
    }
    if !(spec.density > 0.0 && spec.density <= 1.0) {
        return Err(GenError::BadDensity(spec.density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let max_arcs = n * (n - 1);
    let target = ((spec.density * max_arcs as f64).ceil() as usize).min(max_arcs);

    let n_agents = match spec.n_agents {
        Some(k) => {
            if k == 0 {
                return Err(GenError::NoAgents(0));
            }
            k
        }
        None => rng.random_range(1..=(n / 2).max(1)),
    };

    // Source-target pairs.
    let mut pairs = Vec::with_capacity(n_agents);
    let shared = if spec.common_pair {
        let s = rng.random_range(0..n) as u32;
        let mut t = rng.random_range(0..n) as u32;
        while t == s {
            t = rng.random_range(0..n) as u32;
        }
        Some((s, t))
    } else {
        None
    };
    for _ in 0..n_agents {
        match shared {
            Some(p) => pairs.push(p),
            None => {
                let s = rng.random_range(0..n) as u32;
                let mut t = rng.random_range(0..n) as u32;
                while t == s {
                    t = rng.random_range(0..n) as u32;
                }
                pairs.push((s, t));
            }
        }
    }
    let distinct_pairs: std::collections::BTreeSet<(u32, u32)> =
        pairs.iter().cloned().collect();
    if target < distinct_pairs.len() {
        return Err(GenError::DensityTooLow {
            target,
            pairs: distinct_pairs.len(),
        });
    }

    // Arc set: one short path per agent, then uniform filler arcs.
    let mut present = std::collections::BTreeSet::new();
    let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(target);
    let add = |present: &mut std::collections::BTreeSet<(u32, u32)>,
                   arcs: &mut Vec<(u32, u32)>,
                   u: u32,
                   v: u32|
     -> bool {
        if u != v && present.insert((u, v)) {
            arcs.push((u, v));
            true
        } else {
            false
        }
    };
    for &(s, t) in &pairs {
        if present.contains(&(s, t)) {
            continue;
        }
        // Try a path with up to two intermediate hops; fall back to the
        // direct arc when the remaining arc budget is tight.
        let hops = rng.random_range(0..=2usize.min(n.saturating_sub(2)));
        let mut nodes = vec![s];
        let mut used: std::collections::BTreeSet<u32> = [s, t].into_iter().collect();
        for _ in 0..hops {
            let mut w = rng.random_range(0..n) as u32;
            let mut tries = 0;
            while used.contains(&w) && tries < 4 * n {
                w = rng.random_range(0..n) as u32;
                tries += 1;
            }
            if used.contains(&w) {
                break;
            }
            used.insert(w);
            nodes.push(w);
        }
        nodes.push(t);
        let new_count = nodes
            .windows(2)
            .filter(|h| h[0] != h[1] && !present.contains(&(h[0], h[1])))
            .count();
        if arcs.len() + new_count <= target && new_count > 0 {
            for h in nodes.windows(2) {
                add(&mut present, &mut arcs, h[0], h[1]);
            }
        } else {
            add(&mut present, &mut arcs, s, t);
        }
    }
    while arcs.len() < target {
        let u = rng.random_range(0..n) as u32;
        let v = rng.random_range(0..n) as u32;
        add(&mut present, &mut arcs, u, v);
    }

    // Arc data.
    let draw_len = |rng: &mut ChaCha8Rng, range: (f64, f64), integral: bool| -> f64 {
        if integral {
            rng.random_range(range.0.round() as i64..=range.1.round() as i64) as f64
        } else {
            rng.random_range(range.0..range.1)
        }
    };
    let mut network_arcs = Vec::with_capacity(arcs.len());
    for &(u, v) in &arcs {
        let d0 = draw_len(&mut rng, spec.d0_range, spec.integral_lengths);
        let e = match spec.mode {
            Mode::Continuous => 0.0,
            Mode::Discrete => draw_len(&mut rng, spec.extension_range, spec.integral_lengths),
        };
        network_arcs.push(Arc {
            tail: u + 1,
            head: v + 1,
            d0,
            e,
        });
    }

    // Agents: per-arc costs, then a budget as a fraction of total cost.
    let mut agents = Vec::with_capacity(n_agents);
    for &(s, t) in &pairs {
        let costs: Vec<f64> = (0..arcs.len())
            .map(|_| rng.random_range(spec.cost_range.0..spec.cost_range.1))
            .collect();
        let total: f64 = costs.iter().sum();
        let budget =
            total * rng.random_range(spec.budget_fraction.0..spec.budget_fraction.1);
        agents.push(Agent {
            source: s + 1,
            target: t + 1,
            budget,
            costs,
        });
    }

    let instance = InterdictionInstance {
        network: Network {
            nodes: (1..=n as u32).collect(),
            arcs: network_arcs,
        },
        agents,
        mode: spec.mode,
    };
    debug_assert!(instance.validate().is_ok());
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_string;

    #[test]
    fn density_target_is_exact() {
        let spec = RandomSpec {
            n_vertices: 10,
            density: 0.5,
            n_agents: Some(3),
            seed: 7,
            ..RandomSpec::default()
        };
        let inst = gen_random(&spec).unwrap();
        assert_eq!(inst.n_arcs(), 45);
        inst.validate().unwrap();
    }

    #[test]
    fn full_density_gives_complete_digraph() {
        let spec = RandomSpec {
            n_vertices: 4,
            density: 1.0,
            n_agents: Some(1),
            seed: 3,
            ..RandomSpec::default()
        };
        let inst = gen_random(&spec).unwrap();
        assert_eq!(inst.n_arcs(), 12);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = RandomSpec {
            n_vertices: 8,
            density: 0.4,
            n_agents: Some(2),
            seed: 99,
            ..RandomSpec::default()
        };
        let a = instance_to_string(&gen_random(&spec).unwrap());
        let b = instance_to_string(&gen_random(&spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn common_pair_instances_share_endpoints() {
        let spec = RandomSpec {
            n_vertices: 6,
            density: 0.4,
            n_agents: Some(3),
            seed: 5,
            mode: Mode::Discrete,
            common_pair: true,
            integral_lengths: true,
            ..RandomSpec::default()
        };
        let inst = gen_random(&spec).unwrap();
        let s = inst.agents[0].source;
        let t = inst.agents[0].target;
        for agent in &inst.agents {
            assert_eq!((agent.source, agent.target), (s, t));
        }
        for arc in &inst.network.arcs {
            assert_eq!(arc.d0, arc.d0.round());
            assert_eq!(arc.e, arc.e.round());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut spec = RandomSpec::default();
        spec.n_vertices = 1;
        assert!(matches!(
            gen_random(&spec),
            Err(GenError::TooFewVertices(1))
        ));
        let mut spec = RandomSpec::default();
        spec.density = 0.0;
        assert!(matches!(gen_random(&spec), Err(GenError::BadDensity(_))));
    }
}
