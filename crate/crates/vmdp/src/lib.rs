//! Finite-horizon vector-valued Markov decision processes with exact
//! rational arithmetic.
//!
//! The crate has two independent computation routes for the same
//! quantities: a set-valued backward recursion over Pareto frontiers
//! ([`recursion`]) and brute-force policy enumeration ([`oracle`]).
//! Keeping both honest against each other is the point; tests compare
//! them on bundled and randomized models.

pub mod fronts;
pub mod model;
pub mod oracle;
pub mod pareto;
pub mod rational;
pub mod recursion;

pub use model::{RewardVector, VmdpModel};
pub use pareto::ParetoSet;
pub use rational::Rational;
