//! Set-valued backward recursion.
//!
//! Working backwards from the terminal epoch, each state keeps a whole
//! Pareto frontier instead of a single value:
//!
//! ```text
//! U_N(s) = { R_N(s) }
//! F_t(s) = union over a of  { R_t(s,a) }  (+)  sum_j p_t(j|s,a) * U_{t+1}(j)
//! U_t(s) = efficient_subset(F_t(s))
//! ```
//!
//! where the sum ranges over successors with positive probability and
//! each term independently picks one vector from the successor's
//! frontier. `F_t(s)` can be kept around too, recording which action
//! and which successor picks generated each vector.

use std::collections::BTreeMap;

use itertools::Itertools;
use thiserror::Error;

use crate::model::{ActionIdx, RewardVector, StateIdx, VmdpModel};
use crate::pareto::{efficient_subset, ParetoSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecursionError {
    #[error("epoch {t} is not a decision epoch (1..={max})")]
    NotDecisionEpoch { t: usize, max: usize },
    #[error("empty value set supplied for successor state index {state}")]
    EmptySuccessorSet { state: StateIdx },
    #[error("scalar reduction needs a single objective, model has {m}")]
    NotScalar { m: usize },
}

/// How one vector of an [`FSet`] arises: the action taken now and the
/// vector chosen from each positive-probability successor's frontier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub action: ActionIdx,
    pub successor_picks: BTreeMap<StateIdx, RewardVector>,
}

/// The one-step reachable set `F_t(s)` before Pareto filtering, with a
/// generator recorded for every vector (the first one found, in action
/// order then canonical successor-pick order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSet {
    pub t: usize,
    pub state: StateIdx,
    vectors: ParetoSet,
    generators: BTreeMap<RewardVector, Generator>,
}

impl FSet {
    pub fn vectors(&self) -> &ParetoSet {
        &self.vectors
    }

    pub fn generator(&self, vector: &RewardVector) -> Option<&Generator> {
        self.generators.get(vector)
    }
}

/// Computes `F_t(s)` from the successor frontiers `next[j] = U_{t+1}(j)`.
///
/// Only successors with `p_t(j|s,a) > 0` participate in the choice
/// product, so zero-probability branches never multiply the work or
/// constrain the result.
pub fn f_set(
    model: &VmdpModel,
    t: usize,
    s: StateIdx,
    next: &[ParetoSet],
) -> Result<FSet, RecursionError> {
    let max = model.horizon() - 1;
    if t < 1 || t > max {
        return Err(RecursionError::NotDecisionEpoch { t, max });
    }
    assert_eq!(next.len(), model.num_states(), "one successor set per state");
    for (j, set) in next.iter().enumerate() {
        if set.is_empty() {
            return Err(RecursionError::EmptySuccessorSet { state: j });
        }
    }

    let mut generators: BTreeMap<RewardVector, Generator> = BTreeMap::new();
    for a in 0..model.num_actions(s) {
        let reward = model.reward(t, s, a);
        let row = model.transition_row(t, s, a);
        let support: Vec<StateIdx> = (0..model.num_states()).filter(|&j| !row[j].is_zero()).collect();
        if support.is_empty() {
            generators
                .entry(reward.clone())
                .or_insert_with(|| Generator { action: a, successor_picks: BTreeMap::new() });
            continue;
        }
        for picks in support.iter().map(|&j| next[j].iter()).multi_cartesian_product() {
            let mut total = reward.clone();
            for (&j, pick) in support.iter().zip(&picks) {
                total = total.add(&pick.scaled(&row[j]));
            }
            generators.entry(total).or_insert_with(|| Generator {
                action: a,
                successor_picks: support.iter().copied().zip(picks.iter().map(|&p| p.clone())).collect(),
            });
        }
    }

    let vectors = ParetoSet::from_vectors(generators.keys().cloned().collect());
    Ok(FSet { t, state: s, vectors, generators })
}

/// Frontiers `U_t(s)` for every epoch `1..=N` and state, plus the
/// unfiltered `F_t(s)` when requested.
#[derive(Debug, Clone)]
pub struct ValueTable {
    horizon: usize,
    frontiers: BTreeMap<(usize, StateIdx), ParetoSet>,
    f_sets: Option<BTreeMap<(usize, StateIdx), FSet>>,
}

impl ValueTable {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `U_t(s)`; valid for `t` in `1..=N`.
    pub fn frontier(&self, t: usize, s: StateIdx) -> &ParetoSet {
        self.frontiers
            .get(&(t, s))
            .unwrap_or_else(|| panic!("no frontier for (t={t}, s={s})"))
    }

    /// `F_t(s)` if the table was built keeping them; `t` in `1..=N-1`.
    pub fn f_set(&self, t: usize, s: StateIdx) -> Option<&FSet> {
        self.f_sets.as_ref()?.get(&(t, s))
    }

    pub fn keeps_f_sets(&self) -> bool {
        self.f_sets.is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, StateIdx), &ParetoSet)> {
        self.frontiers.iter()
    }
}

/// Runs the full backward recursion on a validated model.
pub fn white_recursion(model: &VmdpModel) -> ValueTable {
    run_recursion(model, false)
}

/// As [`white_recursion`], also retaining every `F_t(s)` and the
/// generator behind each of its vectors.
pub fn white_recursion_keeping_f_sets(model: &VmdpModel) -> ValueTable {
    run_recursion(model, true)
}

fn run_recursion(model: &VmdpModel, keep_f_sets: bool) -> ValueTable {
    let n = model.horizon();
    let mut frontiers = BTreeMap::new();
    let mut f_sets = keep_f_sets.then(BTreeMap::new);

    let mut next: Vec<ParetoSet> = (0..model.num_states())
        .map(|s| ParetoSet::singleton(model.terminal_reward(s).clone()))
        .collect();
    for (s, set) in next.iter().enumerate() {
        frontiers.insert((n, s), set.clone());
    }

    for t in model.decision_epochs().rev() {
        let mut layer = Vec::with_capacity(model.num_states());
        for s in 0..model.num_states() {
            let fs = f_set(model, t, s, &next).expect("valid epoch and nonempty successor sets");
            let frontier = efficient_subset(fs.vectors().vectors()).expect("f_set is never empty");
            frontiers.insert((t, s), frontier.clone());
            if let Some(store) = f_sets.as_mut() {
                store.insert((t, s), fs);
            }
            layer.push(frontier);
        }
        next = layer;
    }

    ValueTable { horizon: n, frontiers, f_sets }
}

/// Classical single-objective dynamic programming:
/// `u_t(s) = max_a [ R_t(s,a) + sum_j p_t(j|s,a) u_{t+1}(j) ]`.
///
/// Written independently of the set-valued route so the two can check
/// each other on one-objective models. Errors unless `m = 1`.
pub fn scalar_bellman(model: &VmdpModel) -> Result<BTreeMap<(usize, StateIdx), Rational>, RecursionError> {
    if model.num_objectives() != 1 {
        return Err(RecursionError::NotScalar { m: model.num_objectives() });
    }
    let n = model.horizon();
    let mut values = BTreeMap::new();
    for s in 0..model.num_states() {
        values.insert((n, s), model.terminal_reward(s).get(0).clone());
    }
    for t in model.decision_epochs().rev() {
        for s in 0..model.num_states() {
            let best = (0..model.num_actions(s))
                .map(|a| {
                    let row = model.transition_row(t, s, a);
                    let expect: Rational = (0..model.num_states())
                        .map(|j| &row[j] * &values[&(t + 1, j)])
                        .sum();
                    model.reward(t, s, a).get(0) + expect
                })
                .max()
                .expect("validated models have nonempty action sets");
            values.insert((t, s), best);
        }
    }
    Ok(values)
}
