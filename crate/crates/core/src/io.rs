//! Canonical instance and profile files.
//!
//! Instances are stored as JSON with fixed field order and two-space
//! indentation; numbers use the shortest round-trip decimal form, so saving
//! a loaded canonical file echoes it byte for byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{
    Agent, Arc, InterdictionInstance, InstanceError, Mode, Network, StrategyProfile,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("agent {agent}: missing cost for arc ({tail}, {head})")]
    MissingCost { agent: usize, tail: u32, head: u32 },
    #[error("agent {agent}: cost key {key:?} does not name an arc")]
    UnknownCostKey { agent: usize, key: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] InstanceError),
}

#[derive(Serialize, Deserialize)]
struct ArcDoc {
    tail: u32,
    head: u32,
    d0: f64,
    e: f64,
}

#[derive(Serialize, Deserialize)]
struct AgentDoc {
    source: u32,
    target: u32,
    budget: f64,
    costs: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    mode: Mode,
    nodes: Vec<u32>,
    arcs: Vec<ArcDoc>,
    agents: Vec<AgentDoc>,
}

fn cost_key(tail: u32, head: u32) -> String {
    format!("{tail},{head}")
}

/// Serializes an instance to its canonical textual form.
pub fn instance_to_string(instance: &InterdictionInstance) -> String {
    let doc = InstanceDoc {
        mode: instance.mode,
        nodes: instance.network.nodes.clone(),
        arcs: instance
            .network
            .arcs
            .iter()
            .map(|a| ArcDoc {
                tail: a.tail,
                head: a.head,
                d0: a.d0,
                e: a.e,
            })
            .collect(),
        agents: instance
            .agents
            .iter()
            .map(|agent| AgentDoc {
                source: agent.source,
                target: agent.target,
                budget: agent.budget,
                costs: instance
                    .network
                    .arcs
                    .iter()
                    .zip(&agent.costs)
                    .map(|(a, &c)| (cost_key(a.tail, a.head), c))
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance serialization");
    text.push('\n');
    text
}

/// Parses an instance document and validates it; warnings are discarded.
pub fn instance_from_str(text: &str) -> Result<InterdictionInstance, IoError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let arcs: Vec<Arc> = doc
        .arcs
        .iter()
        .map(|a| Arc {
            tail: a.tail,
            head: a.head,
            d0: a.d0,
            e: a.e,
        })
        .collect();
    let mut agents = Vec::with_capacity(doc.agents.len());
    for (f, agent) in doc.agents.iter().enumerate() {
        let mut costs = Vec::with_capacity(arcs.len());
        for arc in &arcs {
            let key = cost_key(arc.tail, arc.head);
            match agent.costs.get(&key) {
                Some(&c) => costs.push(c),
                None => {
                    return Err(IoError::MissingCost {
                        agent: f,
                        tail: arc.tail,
                        head: arc.head,
                    })
                }
            }
        }
        if agent.costs.len() != arcs.len() {
            let known: std::collections::BTreeSet<String> = arcs
                .iter()
                .map(|a| cost_key(a.tail, a.head))
                .collect();
            let extra = agent
                .costs
                .keys()
                .find(|k| !known.contains(*k))
                .cloned()
                .unwrap_or_default();
            return Err(IoError::UnknownCostKey {
                agent: f,
                key: extra,
            });
        }
        agents.push(Agent {
            source: agent.source,
            target: agent.target,
            budget: agent.budget,
            costs,
        });
    }
    let instance = InterdictionInstance {
        network: Network {
            nodes: doc.nodes,
            arcs,
        },
        agents,
        mode: doc.mode,
    };
    instance.validate()?;
    Ok(instance)
}

pub fn save_instance(instance: &InterdictionInstance, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, instance_to_string(instance))?;
    Ok(())
}

pub fn load_instance(path: &Path) -> Result<InterdictionInstance, IoError> {
    instance_from_str(&std::fs::read_to_string(path)?)
}

#[derive(Serialize, Deserialize)]
struct ProfileDoc {
    x: Vec<Vec<f64>>,
}

pub fn profile_to_string(profile: &StrategyProfile) -> String {
    let mut text = serde_json::to_string_pretty(&ProfileDoc {
        x: profile.x.clone(),
    })
    .expect("profile serialization");
    text.push('\n');
    text
}

pub fn profile_from_str(text: &str) -> Result<StrategyProfile, IoError> {
    let doc: ProfileDoc = serde_json::from_str(text)?;
    Ok(StrategyProfile { x: doc.x })
}

pub fn save_profile(profile: &StrategyProfile, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, profile_to_string(profile))?;
    Ok(())
}

pub fn load_profile(path: &Path) -> Result<StrategyProfile, IoError> {
    profile_from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{gen_ladder, LadderSpec};

    #[test]
    fn canonical_round_trip_is_byte_exact() {
        let inst = gen_ladder(&LadderSpec::continuous(2, 2.0));
        let text = instance_to_string(&inst);
        let reloaded = instance_from_str(&text).unwrap();
        assert_eq!(reloaded, inst);
        assert_eq!(instance_to_string(&reloaded), text);
    }

    #[test]
    fn missing_cost_is_reported() {
        let inst = gen_ladder(&LadderSpec::continuous(1, 2.0));
        let mut text = instance_to_string(&inst);
        text = text.replace("\"1,2\"", "\"9,9\"");
        match instance_from_str(&text) {
            Err(IoError::MissingCost { tail: 1, head: 2, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn profile_round_trip() {
        let profile = StrategyProfile {
            x: vec![vec![0.0, 0.5], vec![0.25, 0.125]],
        };
        let text = profile_to_string(&profile);
        assert_eq!(profile_from_str(&text).unwrap(), profile);
    }
}
