//! Optimal transmission policies for remote estimation of a two-state
//! (normal/alarm) Markov source over an unreliable channel.
//!
//! A sensor watches the source and decides each slot whether to sample and
//! transmit; the receiver keeps the last delivered sample as its estimate.
//! Two age processes grade the two kinds of estimation error: the age of
//! missed alarm grows while an alarm goes unreported, the age of false alarm
//! while a stale alarm lingers. The objective trades the weighted ages
//! against the transmission budget.
//!
//! The crate provides, for that model:
//!
//! * the state space, transition kernel, and stage costs ([`model`]);
//! * exact stationary distributions and average costs for age-agnostic
//!   randomized policies and two-threshold switching policies, including
//!   age-truncated variants with their closed-form cost gap ([`analytic`]);
//! * a finite truncated MDP solved by relative value iteration as the
//!   ground-truth optimum ([`mdp`]);
//! * an O(N^2) slice-pruned threshold search and a diagonal fast path for
//!   symmetric non-prioritized sources ([`search`]);
//! * a reproducible Monte Carlo engine with batch-means error bars, plus
//!   policy comparison metrics ([`sim`]);
//! * a linear-solve oracle cross-checking every closed form ([`oracle`]).

pub mod analytic;
pub mod error;
pub mod mdp;
pub mod model;
pub mod oracle;
pub mod policy;
pub mod search;
pub mod sim;

pub use analytic::{
    GeometricTail, PolicyMetrics, RandomizedPolicy, StationaryDistribution, SwitchingPolicy,
};
pub use error::{Error, Result};
pub use model::{Action, ErrorKind, ModelParams, SourceState, StateSpace, SystemState};
pub use policy::Policy;
