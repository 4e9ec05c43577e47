//! Solver suite for decentralized shortest-path interdiction (DSPI) games.
//!
//! Multiple interdictors spend budgets to lengthen arcs of a shared directed
//! network, each trying to maximize the shortest source-target path length of
//! its own adversary. This crate models such instances, assembles and solves
//! the continuous game as a linear complementarity problem via Lemke's
//! method, runs (regularized) Gauss-Seidel best-response dynamics for both
//! continuous and discrete interdiction, and measures the efficiency loss of
//! equilibria against centralized optima.

pub mod bimatrix;
pub mod dense;
pub mod dynamics;
pub mod efficiency;
pub mod gnep;
pub mod instance;
pub mod io;
pub mod ladder;
pub mod lcp;
pub mod randgen;
pub mod report;
pub mod simplex;
pub mod subproblems;

pub use instance::{
    Agent, Arc, DualProfile, InterdictionInstance, Mode, Network, StrategyProfile,
};
