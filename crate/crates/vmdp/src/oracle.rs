//! Brute-force ground truth.
//!
//! Everything here is deliberately independent of the set-valued
//! recursion: policies are enumerated exhaustively (as mixed-radix
//! counters, never materialized as a list) and evaluated by backward
//! induction over states or over the history tree. The attainable-value
//! sets
//!
//! ```text
//! V_t(s)    = { u_t^pi(s)   : pi a Markov policy }
//! V'_t(h_t) = { u_t^pi(h_t) : pi a history policy }
//! ```
//!
//! serve as the reference the recursion is checked against, and the
//! module can search them for witness policies of a given value vector
//! or refute that any exists.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{ActionIdx, PolicyCount, RewardVector, StateIdx, VmdpModel};
use crate::pareto::{efficient_subset, ParetoSet};
use crate::recursion::white_recursion_keeping_f_sets;

/// Default bound on exhaustive enumeration, overridable per call.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Hard bound on history-tree nodes per policy evaluation. A model
/// with few policies can still have an enormous tree (long chains of
/// single-action states), and the tree is materialized layer by layer.
pub const HISTORY_TREE_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicySpace {
    Markov,
    History,
}

impl fmt::Display for PolicySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpace::Markov => write!(f, "Markov"),
            PolicySpace::History => write!(f, "history"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{space} policy space holds {required} policies, exceeding the cap of {cap}")]
    CapExceeded { space: PolicySpace, required: PolicyCount, cap: u64 },
    #[error("history tree holds {nodes} nodes, exceeding the supported {cap}")]
    TreeExceeded { nodes: PolicyCount, cap: u64 },
    #[error("policy does not fit the model: {reason}")]
    InvalidPolicy { reason: String },
    #[error("action index {action} is not available in state index {state}")]
    InvalidAction { state: StateIdx, action: ActionIdx },
    #[error("epoch {t} is not a decision epoch (1..={max})")]
    NotDecisionEpoch { t: usize, max: usize },
}

/// A deterministic Markov policy: one action per (decision epoch, state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovPolicy {
    rules: Vec<Vec<ActionIdx>>,
}

impl MarkovPolicy {
    /// `rules[t-1][s]` is the action taken at epoch `t` in state `s`.
    pub fn new(rules: Vec<Vec<ActionIdx>>) -> Self {
        MarkovPolicy { rules }
    }

    /// The policy taking action index `a` everywhere.
    pub fn constant(model: &VmdpModel, a: ActionIdx) -> Self {
        let row: Vec<ActionIdx> = vec![a; model.num_states()];
        MarkovPolicy { rules: vec![row; model.horizon() - 1] }
    }

    pub fn action(&self, t: usize, s: StateIdx) -> ActionIdx {
        self.rules[t - 1][s]
    }

    pub fn rules(&self) -> &[Vec<ActionIdx>] {
        &self.rules
    }

    fn check(&self, model: &VmdpModel) -> Result<(), OracleError> {
        let epochs = model.horizon() - 1;
        if self.rules.len() != epochs {
            return Err(OracleError::InvalidPolicy {
                reason: format!("{} rule rows for {} decision epochs", self.rules.len(), epochs),
            });
        }
        for row in &self.rules {
            if row.len() != model.num_states() {
                return Err(OracleError::InvalidPolicy {
                    reason: format!("rule row covers {} of {} states", row.len(), model.num_states()),
                });
            }
            for (s, &a) in row.iter().enumerate() {
                if a >= model.num_actions(s) {
                    return Err(OracleError::InvalidAction { state: s, action: a });
                }
            }
        }
        Ok(())
    }
}

/// A nonempty sequence of visited states `(s_1, ..., s_t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct History(Vec<StateIdx>);

impl History {
    pub fn new(states: Vec<StateIdx>) -> Self {
        assert!(!states.is_empty(), "histories are nonempty");
        History(states)
    }

    pub fn single(s: StateIdx) -> Self {
        History(vec![s])
    }

    pub fn extended(&self, j: StateIdx) -> History {
        let mut states = self.0.clone();
        states.push(j);
        History(states)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> StateIdx {
        *self.0.last().expect("nonempty")
    }

    pub fn states(&self) -> &[StateIdx] {
        &self.0
    }

    /// Position of this history in the lexicographic enumeration of
    /// `S^t`: digits are states, most significant first.
    pub fn rank(&self, num_states: usize) -> usize {
        self.0.iter().fold(0, |r, &s| r * num_states + s)
    }

    pub fn from_rank(len: usize, mut rank: usize, num_states: usize) -> History {
        let mut states = vec![0; len];
        for slot in states.iter_mut().rev() {
            *slot = rank % num_states;
            rank /= num_states;
        }
        History(states)
    }

    /// All histories of length `len`, in rank order.
    pub fn all(len: usize, num_states: usize) -> impl Iterator<Item = History> {
        let total = num_states.checked_pow(len as u32).expect("history space fits usize");
        (0..total).map(move |r| History::from_rank(len, r, num_states))
    }

    pub fn label(&self, model: &VmdpModel) -> String {
        self.0
            .iter()
            .map(|&s| model.state_name(s))
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// A deterministic history-dependent policy: one action per (decision
/// epoch, history of that length), histories indexed by rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryPolicy {
    num_states: usize,
    rules: Vec<Vec<ActionIdx>>,
}

impl HistoryPolicy {
    /// `rules[t-1][rank(h_t)]` is the action at epoch `t` after `h_t`.
    pub fn new(num_states: usize, rules: Vec<Vec<ActionIdx>>) -> Self {
        HistoryPolicy { num_states, rules }
    }

    pub fn action(&self, t: usize, h: &History) -> ActionIdx {
        self.rules[t - 1][h.rank(self.num_states)]
    }

    pub fn rules(&self) -> &[Vec<ActionIdx>] {
        &self.rules
    }

    fn check(&self, model: &VmdpModel) -> Result<(), OracleError> {
        let epochs = model.horizon() - 1;
        if self.num_states != model.num_states() {
            return Err(OracleError::InvalidPolicy {
                reason: format!("indexed over {} states, model has {}", self.num_states, model.num_states()),
            });
        }
        if self.rules.len() != epochs {
            return Err(OracleError::InvalidPolicy {
                reason: format!("{} rule rows for {} decision epochs", self.rules.len(), epochs),
            });
        }
        for (i, row) in self.rules.iter().enumerate() {
            let expected = history_space(model, i + 1).ok_or_else(|| OracleError::InvalidPolicy {
                reason: "history space exceeds addressable size".into(),
            })?;
            if row.len() != expected {
                return Err(OracleError::InvalidPolicy {
                    reason: format!("rule row {} covers {} of {} histories", i + 1, row.len(), expected),
                });
            }
            for (rank, &a) in row.iter().enumerate() {
                let s = rank % model.num_states();
                if a >= model.num_actions(s) {
                    return Err(OracleError::InvalidAction { state: s, action: a });
                }
            }
        }
        Ok(())
    }
}

fn history_space(model: &VmdpModel, t: usize) -> Option<usize> {
    model.num_states().checked_pow(t as u32)
}

/// `u_t^pi(s)` for a Markov policy, all `t` in `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovValues {
    values: Vec<Vec<RewardVector>>,
}

impl MarkovValues {
    pub fn value(&self, t: usize, s: StateIdx) -> &RewardVector {
        &self.values[t - 1][s]
    }
}

/// `u_t^pi(h_t)` for a history policy, all `t` in `1..=N`, histories by
/// rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryValues {
    num_states: usize,
    values: Vec<Vec<RewardVector>>,
}

impl HistoryValues {
    pub fn value(&self, t: usize, h: &History) -> &RewardVector {
        assert_eq!(h.len(), t, "history length must equal its epoch");
        &self.values[t - 1][h.rank(self.num_states)]
    }

    pub fn value_by_rank(&self, t: usize, rank: usize) -> &RewardVector {
        &self.values[t - 1][rank]
    }
}

/// Backward evaluation of a Markov policy, exact at every (t, s).
pub fn evaluate_markov(model: &VmdpModel, policy: &MarkovPolicy) -> Result<MarkovValues, OracleError> {
    policy.check(model)?;
    Ok(evaluate_markov_unchecked(model, policy))
}

fn evaluate_markov_unchecked(model: &VmdpModel, policy: &MarkovPolicy) -> MarkovValues {
    let n = model.horizon();
    let ns = model.num_states();
    let mut values: Vec<Vec<RewardVector>> = vec![Vec::new(); n];
    values[n - 1] = (0..ns).map(|s| model.terminal_reward(s).clone()).collect();
    for t in (1..n).rev() {
        let layer: Vec<RewardVector> = {
            let next = &values[t];
            (0..ns)
                .map(|s| {
                    let a = policy.action(t, s);
                    let row = model.transition_row(t, s, a);
                    let mut total = model.reward(t, s, a).clone();
                    for (j, p) in row.iter().enumerate() {
                        if !p.is_zero() {
                            total = total.add(&next[j].scaled(p));
                        }
                    }
                    total
                })
                .collect()
        };
        values[t - 1] = layer;
    }
    MarkovValues { values }
}

/// Backward evaluation of a history policy over the full history tree.
/// Exact; extending a history of rank `r` by state `j` lands at rank
/// `r * |S| + j`, so each layer is one pass.
pub fn evaluate_history(model: &VmdpModel, policy: &HistoryPolicy) -> Result<HistoryValues, OracleError> {
    policy.check(model)?;
    Ok(evaluate_history_unchecked(model, policy))
}

fn evaluate_history_unchecked(model: &VmdpModel, policy: &HistoryPolicy) -> HistoryValues {
    let n = model.horizon();
    let ns = model.num_states();
    let mut values: Vec<Vec<RewardVector>> = vec![Vec::new(); n];
    let terminal_space = history_space(model, n).expect("checked by policy shape");
    values[n - 1] = (0..terminal_space)
        .map(|r| model.terminal_reward(r % ns).clone())
        .collect();
    for t in (1..n).rev() {
        let layer: Vec<RewardVector> = {
            let next = &values[t];
            (0..history_space(model, t).expect("smaller than terminal space"))
                .map(|r| {
                    let s = r % ns;
                    let a = policy.rules[t - 1][r];
                    let row = model.transition_row(t, s, a);
                    let mut total = model.reward(t, s, a).clone();
                    for (j, p) in row.iter().enumerate() {
                        if !p.is_zero() {
                            total = total.add(&next[r * ns + j].scaled(p));
                        }
                    }
                    total
                })
                .collect()
        };
        values[t - 1] = layer;
    }
    HistoryValues { num_states: ns, values }
}

/// Streams every Markov policy exactly once (lexicographic order over
/// rule tables). Errors if the space exceeds `cap`.
pub fn enumerate_markov(model: &VmdpModel, cap: u64) -> Result<MarkovPolicyIter<'_>, OracleError> {
    let required = model.markov_policy_count();
    if required.exceeds(cap) {
        return Err(OracleError::CapExceeded { space: PolicySpace::Markov, required, cap });
    }
    Ok(MarkovPolicyIter {
        model,
        digits: vec![vec![0; model.num_states()]; model.horizon() - 1],
        exhausted: false,
        started: false,
    })
}

pub struct MarkovPolicyIter<'a> {
    model: &'a VmdpModel,
    digits: Vec<Vec<ActionIdx>>,
    exhausted: bool,
    started: bool,
}

impl Iterator for MarkovPolicyIter<'_> {
    type Item = MarkovPolicy;

    fn next(&mut self) -> Option<MarkovPolicy> {
        if self.exhausted {
            return None;
        }
        if self.started {
            // little-endian increment over (t, s) cells, radix |A_s|
            let mut carried = true;
            'outer: for row in self.digits.iter_mut().rev() {
                for (s, digit) in row.iter_mut().enumerate().rev() {
                    *digit += 1;
                    if *digit < self.model.num_actions(s) {
                        carried = false;
                        break 'outer;
                    }
                    *digit = 0;
                }
            }
            if carried {
                self.exhausted = true;
                return None;
            }
        }
        self.started = true;
        Some(MarkovPolicy { rules: self.digits.clone() })
    }
}

/// Streams every history policy exactly once. Errors if the policy
/// space exceeds `cap` or the history tree itself is beyond
/// [`HISTORY_TREE_CAP`].
pub fn enumerate_history(model: &VmdpModel, cap: u64) -> Result<HistoryPolicyIter<'_>, OracleError> {
    let required = model.history_policy_count();
    if required.exceeds(cap) {
        return Err(OracleError::CapExceeded { space: PolicySpace::History, required, cap });
    }
    check_tree_size(model)?;
    let digits: Vec<Vec<ActionIdx>> = (1..model.horizon())
        .map(|t| vec![0; history_space(model, t).expect("bounded by the tree cap")])
        .collect();
    Ok(HistoryPolicyIter { model, digits, exhausted: false, started: false })
}

fn check_tree_size(model: &VmdpModel) -> Result<(), OracleError> {
    use num_bigint::BigUint;
    let ns = BigUint::from(model.num_states());
    let mut total = BigUint::from(0u32);
    let mut layer = BigUint::from(1u32);
    for _ in 1..=model.horizon() {
        layer *= &ns;
        total += &layer;
    }
    let nodes = PolicyCount::Exact(total);
    if nodes.exceeds(HISTORY_TREE_CAP) {
        return Err(OracleError::TreeExceeded { nodes, cap: HISTORY_TREE_CAP });
    }
    Ok(())
}

pub struct HistoryPolicyIter<'a> {
    model: &'a VmdpModel,
    digits: Vec<Vec<ActionIdx>>,
    exhausted: bool,
    started: bool,
}

impl Iterator for HistoryPolicyIter<'_> {
    type Item = HistoryPolicy;

    fn next(&mut self) -> Option<HistoryPolicy> {
        if self.exhausted {
            return None;
        }
        let ns = self.model.num_states();
        if self.started {
            let mut carried = true;
            'outer: for row in self.digits.iter_mut().rev() {
                for (rank, digit) in row.iter_mut().enumerate().rev() {
                    *digit += 1;
                    if *digit < self.model.num_actions(rank % ns) {
                        carried = false;
                        break 'outer;
                    }
                    *digit = 0;
                }
            }
            if carried {
                self.exhausted = true;
                return None;
            }
        }
        self.started = true;
        Some(HistoryPolicy { num_states: ns, rules: self.digits.clone() })
    }
}

/// `V_t(s)` for every epoch and state, built by full enumeration.
#[derive(Debug, Clone)]
pub struct MarkovValueSets {
    pub policy_count: u64,
    sets: Vec<Vec<BTreeSet<RewardVector>>>,
}

impl MarkovValueSets {
    pub fn set(&self, t: usize, s: StateIdx) -> &BTreeSet<RewardVector> {
        &self.sets[t - 1][s]
    }

    /// `e(V_t(s))`.
    pub fn efficient(&self, t: usize, s: StateIdx) -> ParetoSet {
        let members: Vec<RewardVector> = self.set(t, s).iter().cloned().collect();
        efficient_subset(&members).expect("value sets are nonempty")
    }
}

pub fn v_sets_markov(model: &VmdpModel, cap: u64) -> Result<MarkovValueSets, OracleError> {
    let n = model.horizon();
    let ns = model.num_states();
    let mut sets: Vec<Vec<BTreeSet<RewardVector>>> = (0..n).map(|_| vec![BTreeSet::new(); ns]).collect();
    let mut policy_count = 0u64;
    for policy in enumerate_markov(model, cap)? {
        let values = evaluate_markov_unchecked(model, &policy);
        for t in 1..=n {
            for (s, set) in sets[t - 1].iter_mut().enumerate() {
                set.insert(values.value(t, s).clone());
            }
        }
        policy_count += 1;
    }
    Ok(MarkovValueSets { policy_count, sets })
}

/// `V'_t(h_t)` for every epoch and history, built by full enumeration.
#[derive(Debug, Clone)]
pub struct HistoryValueSets {
    pub policy_count: u64,
    num_states: usize,
    sets: Vec<Vec<BTreeSet<RewardVector>>>,
}

impl HistoryValueSets {
    pub fn set(&self, t: usize, h: &History) -> &BTreeSet<RewardVector> {
        assert_eq!(h.len(), t, "history length must equal its epoch");
        &self.sets[t - 1][h.rank(self.num_states)]
    }

    pub fn set_by_rank(&self, t: usize, rank: usize) -> &BTreeSet<RewardVector> {
        &self.sets[t - 1][rank]
    }

    /// `e(V'_t(h_t))`.
    pub fn efficient(&self, t: usize, h: &History) -> ParetoSet {
        let members: Vec<RewardVector> = self.set(t, h).iter().cloned().collect();
        efficient_subset(&members).expect("value sets are nonempty")
    }
}

pub fn v_sets_history(model: &VmdpModel, cap: u64) -> Result<HistoryValueSets, OracleError> {
    let n = model.horizon();
    let ns = model.num_states();
    let policies = enumerate_history(model, cap)?;
    let mut sets: Vec<Vec<BTreeSet<RewardVector>>> = (1..=n)
        .map(|t| vec![BTreeSet::new(); history_space(model, t).expect("bounded by the tree cap")])
        .collect();
    let mut policy_count = 0u64;
    for policy in policies {
        let values = evaluate_history_unchecked(model, &policy);
        for (layer, value_layer) in sets.iter_mut().zip(&values.values) {
            for (set, value) in layer.iter_mut().zip(value_layer) {
                set.insert(value.clone());
            }
        }
        policy_count += 1;
    }
    Ok(HistoryValueSets { policy_count, num_states: ns, sets })
}

/// Lifts a Markov policy into the history-policy space: the action
/// after `h_t` is the Markov action at `(t, last(h_t))`.
pub fn embed(model: &VmdpModel, policy: &MarkovPolicy) -> HistoryPolicy {
    let ns = model.num_states();
    let rules: Vec<Vec<ActionIdx>> = (1..model.horizon())
        .map(|t| {
            (0..history_space(model, t).expect("history space fits usize"))
                .map(|rank| policy.action(t, rank % ns))
                .collect()
        })
        .collect();
    HistoryPolicy { num_states: ns, rules }
}

/// A policy built around one deviation, plus the exact value it
/// guarantees at the deviation point.
#[derive(Debug, Clone)]
pub struct Stitched {
    pub policy: HistoryPolicy,
    pub value: RewardVector,
}

/// Stitches a policy that takes `a` after `h` (at epoch `t = |h|`) and,
/// whenever the next state is `j`, follows `continuations[j]` on every
/// longer history. Unconstrained entries default to action 0. The
/// returned value is
/// `R_t(s_t, a) + sum_j p_t(j|s_t, a) * u_{t+1}^{continuations[j]}(h, j)`,
/// and evaluating the stitched policy at `(t, h)` reproduces it exactly.
pub fn stitch(
    model: &VmdpModel,
    h: &History,
    a: ActionIdx,
    continuations: &[HistoryPolicy],
) -> Result<Stitched, OracleError> {
    let t = h.len();
    let n = model.horizon();
    let ns = model.num_states();
    if t >= n {
        return Err(OracleError::NotDecisionEpoch { t, max: n - 1 });
    }
    let s = h.last();
    if a >= model.num_actions(s) {
        return Err(OracleError::InvalidAction { state: s, action: a });
    }
    if continuations.len() != ns {
        return Err(OracleError::InvalidPolicy {
            reason: format!("{} continuations for {} states", continuations.len(), ns),
        });
    }
    for c in continuations {
        c.check(model)?;
    }

    let mut rules: Vec<Vec<ActionIdx>> = (1..n)
        .map(|k| vec![0; history_space(model, k).expect("checked by continuations")])
        .collect();
    let base_rank = h.rank(ns);
    rules[t - 1][base_rank] = a;
    for k in t + 1..n {
        let suffixes = ns.pow((k - t) as u32);
        for suffix in 0..suffixes {
            let rank = base_rank * suffixes + suffix;
            // leading suffix digit = the state entered right after h,
            // which selects the continuation to follow
            let j = suffix / (suffixes / ns);
            rules[k - 1][rank] = continuations[j].rules[k - 1][rank];
        }
    }

    let row = model.transition_row(t, s, a);
    let mut value = model.reward(t, s, a).clone();
    for j in 0..ns {
        if row[j].is_zero() {
            continue;
        }
        let tail = evaluate_history_unchecked(model, &continuations[j]);
        let extended = h.extended(j);
        value = value.add(&tail.value(t + 1, &extended).scaled(&row[j]));
    }

    Ok(Stitched { policy: HistoryPolicy { num_states: ns, rules }, value })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PViolation {
    pub t: usize,
    pub state: StateIdx,
    pub vector: RewardVector,
    pub generator_action: ActionIdx,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPrimeViolation {
    pub t: usize,
    pub history: History,
    pub vector: RewardVector,
    pub generator_action: ActionIdx,
}

#[derive(Debug, Clone)]
pub struct PropertyPReport {
    pub holds: bool,
    pub policy_count: u64,
    pub violations: Vec<PViolation>,
}

#[derive(Debug, Clone)]
pub struct PropertyPPrimeReport {
    pub holds: bool,
    pub policy_count: u64,
    pub violations: Vec<PPrimeViolation>,
}

/// Tests `F_t(s) subset-of V_t(s)` for every decision epoch and state
/// by exact membership against the exhaustive Markov value sets.
pub fn check_property_p(model: &VmdpModel, cap: u64) -> Result<PropertyPReport, OracleError> {
    let table = white_recursion_keeping_f_sets(model);
    let v = v_sets_markov(model, cap)?;
    let mut violations = Vec::new();
    for t in model.decision_epochs() {
        for s in 0..model.num_states() {
            let fs = table.f_set(t, s).expect("kept by construction");
            for vector in fs.vectors() {
                if !v.set(t, s).contains(vector) {
                    violations.push(PViolation {
                        t,
                        state: s,
                        vector: vector.clone(),
                        generator_action: fs.generator(vector).expect("every vector has one").action,
                    });
                }
            }
        }
    }
    Ok(PropertyPReport { holds: violations.is_empty(), policy_count: v.policy_count, violations })
}

/// Tests the history analog, `F'_t(h_t) subset-of V'_t(h_t)`. The
/// one-step reachable set after `h_t` depends on the history only
/// through its last state (successor frontiers are state-indexed), so
/// `F'_t(h_t) = F_t(last(h_t))`, checked against `V'_t(h_t)`.
pub fn check_property_p_prime(model: &VmdpModel, cap: u64) -> Result<PropertyPPrimeReport, OracleError> {
    let table = white_recursion_keeping_f_sets(model);
    let v = v_sets_history(model, cap)?;
    let mut violations = Vec::new();
    for t in model.decision_epochs() {
        for h in History::all(t, model.num_states()) {
            let fs = table.f_set(t, h.last()).expect("kept by construction");
            for vector in fs.vectors() {
                if !v.set(t, &h).contains(vector) {
                    violations.push(PPrimeViolation {
                        t,
                        history: h.clone(),
                        vector: vector.clone(),
                        generator_action: fs.generator(vector).expect("every vector has one").action,
                    });
                }
            }
        }
    }
    Ok(PropertyPPrimeReport { holds: violations.is_empty(), policy_count: v.policy_count, violations })
}

/// How witness search compares a policy's value to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    Exact,
    /// Both sides rounded to this many decimals before comparing; for
    /// targets transcribed from rounded tables.
    Rounded(u32),
}

fn matches(value: &RewardVector, target: &RewardVector, mode: MatchMode) -> bool {
    match mode {
        MatchMode::Exact => value == target,
        MatchMode::Rounded(places) => value.round_dp(places) == target.round_dp(places),
    }
}

/// Searches all Markov policies for one whose value at `(t, s)` matches
/// `target`. `Ok(None)` is an exhaustiveness claim: every policy was
/// tried.
pub fn find_witness_markov(
    model: &VmdpModel,
    t: usize,
    s: StateIdx,
    target: &RewardVector,
    mode: MatchMode,
    cap: u64,
) -> Result<Option<MarkovPolicy>, OracleError> {
    check_epoch(model, t)?;
    for policy in enumerate_markov(model, cap)? {
        let values = evaluate_markov_unchecked(model, &policy);
        if matches(values.value(t, s), target, mode) {
            return Ok(Some(policy));
        }
    }
    Ok(None)
}

/// Searches all history policies for one whose value at `(t, h)`
/// matches `target`. `Ok(None)` is an exhaustiveness claim.
pub fn find_witness_history(
    model: &VmdpModel,
    h: &History,
    target: &RewardVector,
    mode: MatchMode,
    cap: u64,
) -> Result<Option<HistoryPolicy>, OracleError> {
    check_epoch(model, h.len())?;
    for policy in enumerate_history(model, cap)? {
        let values = evaluate_history_unchecked(model, &policy);
        if matches(values.value(h.len(), h), target, mode) {
            return Ok(Some(policy));
        }
    }
    Ok(None)
}

fn check_epoch(model: &VmdpModel, t: usize) -> Result<(), OracleError> {
    let max = model.horizon() - 1;
    if t < 1 || t > max {
        return Err(OracleError::NotDecisionEpoch { t, max });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rvs(components: &[&str]) -> RewardVector {
        RewardVector::from_strs(components)
    }

    #[test]
    fn all_a1_markov_value_matches_hand_evaluation() {
        let model = VmdpModel::counterexample();
        let policy = MarkovPolicy::constant(&model, 0);
        let values = evaluate_markov(&model, &policy).unwrap();
        assert_eq!(values.value(4, 0), &RewardVector::from_ints(&[1, 0]));
        assert_eq!(values.value(3, 0), &rvs(&["47/4", "-19/4"]));
        assert_eq!(values.value(3, 1), &rvs(&["11/2", "11/2"]));
        assert_eq!(values.value(2, 0), &rvs(&["339/16", "-115/16"]));
        assert_eq!(values.value(2, 1), &rvs(&["109/8", "43/8"]));
        assert_eq!(values.value(1, 0), &rvs(&["1939/64", "-579/64"]));
        assert_eq!(
            values.value(1, 0).round_dp(1),
            rvs(&["30.3", "-9"])
        );
    }

    #[test]
    fn all_a1_on_deterministic_variant() {
        let model = VmdpModel::deterministic_variant();
        let policy = MarkovPolicy::constant(&model, 0);
        let values = evaluate_markov(&model, &policy).unwrap();
        assert_eq!(values.value(1, 0), &RewardVector::from_ints(&[34, -15]));
    }

    #[test]
    fn shape_and_action_validation() {
        let model = VmdpModel::counterexample();
        let short = MarkovPolicy::new(vec![vec![0, 0]]);
        assert!(matches!(evaluate_markov(&model, &short), Err(OracleError::InvalidPolicy { .. })));
        let bad_action = MarkovPolicy::new(vec![vec![0, 2], vec![0, 0], vec![0, 0]]);
        assert!(matches!(
            evaluate_markov(&model, &bad_action),
            Err(OracleError::InvalidAction { state: 1, action: 2 })
        ));
    }

    #[test]
    fn markov_enumeration_counts_and_dedup() {
        let model = VmdpModel::counterexample();
        let policies: Vec<MarkovPolicy> = enumerate_markov(&model, DEFAULT_CAP).unwrap().collect();
        assert_eq!(policies.len(), 64);
        let distinct: BTreeSet<Vec<Vec<ActionIdx>>> =
            policies.iter().map(|p| p.rules().to_vec()).collect();
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn history_enumeration_counts() {
        let model = VmdpModel::counterexample();
        assert_eq!(enumerate_history(&model, DEFAULT_CAP).unwrap().count(), 16384);
        match enumerate_history(&model, 100).err() {
            Some(OracleError::CapExceeded { space: PolicySpace::History, required, cap: 100 }) => {
                assert_eq!(required, PolicyCount::Exact(16384u32.into()));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn huge_history_trees_are_rejected_even_with_one_policy() {
        // single-action menus: one policy total, but the tree has
        // sum of 4^t for t = 1..=12, about 22 million nodes
        let states: Vec<String> = (1..=4).map(|i| format!("s{i}")).collect();
        let menus = vec![vec!["a1".to_string()]; 4];
        let model = VmdpModel::new(1, 12, states, menus);
        assert_eq!(model.history_policy_count(), PolicyCount::Exact(1u32.into()));
        assert!(matches!(
            enumerate_history(&model, DEFAULT_CAP).err(),
            Some(OracleError::TreeExceeded { .. })
        ));
    }

    #[test]
    fn markov_value_sets_and_efficient_front() {
        let model = VmdpModel::counterexample();
        let v = v_sets_markov(&model, DEFAULT_CAP).unwrap();
        assert_eq!(v.policy_count, 64);
        // e(V_1(s_1)), frozen from hand derivation of the compatible
        // generator combinations
        let front = v.efficient(1, 0);
        let expected = [
            ["47/2", "31/2"],
            ["25", "21/2"],
            ["53/2", "11/2"],
            ["221/8", "3/8"],
            ["115/4", "-2"],
            ["1939/64", "-579/64"],
        ];
        let expected: Vec<RewardVector> = expected.iter().map(|c| rvs(&[c[0], c[1]])).collect();
        assert_eq!(front.vectors(), expected.as_slice());
    }

    #[test]
    fn history_rank_round_trip() {
        for len in 1..=4 {
            for (expected_rank, h) in History::all(len, 3).enumerate() {
                assert_eq!(h.rank(3), expected_rank);
                assert_eq!(History::from_rank(len, expected_rank, 3), h);
                assert_eq!(h.len(), len);
            }
        }
        let h = History::new(vec![0, 1]);
        assert_eq!(h.extended(0).states(), &[0, 1, 0]);
        assert_eq!(h.last(), 1);
    }

    #[test]
    fn embedding_preserves_values_everywhere() {
        let model = VmdpModel::counterexample();
        for policy in enumerate_markov(&model, DEFAULT_CAP).unwrap() {
            let mv = evaluate_markov(&model, &policy).unwrap();
            let hv = evaluate_history(&model, &embed(&model, &policy)).unwrap();
            for t in 1..=model.horizon() {
                for h in History::all(t, model.num_states()) {
                    assert_eq!(hv.value(t, &h), mv.value(t, h.last()));
                }
            }
        }
    }

    #[test]
    fn embedding_is_injective() {
        let model = VmdpModel::counterexample();
        let embedded: BTreeSet<Vec<Vec<ActionIdx>>> = enumerate_markov(&model, DEFAULT_CAP)
            .unwrap()
            .map(|p| embed(&model, &p).rules().to_vec())
            .collect();
        assert_eq!(embedded.len(), 64);
    }

    #[test]
    fn stitch_value_matches_its_own_evaluation() {
        let model = VmdpModel::counterexample();
        let h = History::single(0);
        let continuations = vec![
            embed(&model, &MarkovPolicy::constant(&model, 0)),
            embed(&model, &MarkovPolicy::constant(&model, 1)),
        ];
        let stitched = stitch(&model, &h, 0, &continuations).unwrap();
        let values = evaluate_history(&model, &stitched.policy).unwrap();
        assert_eq!(values.value(1, &h), &stitched.value);
        assert_eq!(stitched.policy.action(1, &h), 0);
        // after moving to s2, epoch-2 behavior comes from the all-a2
        // continuation
        assert_eq!(stitched.policy.action(2, &History::new(vec![0, 1])), 1);
        assert_eq!(stitched.policy.action(2, &History::new(vec![0, 0])), 0);
        // histories not extending h keep the default first action
        assert_eq!(stitched.policy.action(2, &History::new(vec![1, 1])), 0);
    }

    #[test]
    fn stitch_with_uniform_continuation_is_a_one_step_deviation() {
        let model = VmdpModel::counterexample();
        let base = MarkovPolicy::constant(&model, 0);
        let continuations = vec![embed(&model, &base), embed(&model, &base)];
        let stitched = stitch(&model, &History::single(0), 1, &continuations).unwrap();
        let mut deviated = base.rules().to_vec();
        deviated[0][0] = 1;
        let deviated = MarkovPolicy::new(deviated);
        let values = evaluate_markov(&model, &deviated).unwrap();
        assert_eq!(&stitched.value, values.value(1, 0));
    }

    #[test]
    fn stitch_at_last_decision_epoch_ignores_continuations() {
        let model = VmdpModel::counterexample();
        let h = History::new(vec![1, 0, 0]);
        let a = vec![embed(&model, &MarkovPolicy::constant(&model, 0)); 2];
        let b = vec![embed(&model, &MarkovPolicy::constant(&model, 1)); 2];
        let wa = stitch(&model, &h, 0, &a).unwrap().value;
        let wb = stitch(&model, &h, 0, &b).unwrap().value;
        assert_eq!(wa, wb);
        assert_eq!(wa, rvs(&["47/4", "-19/4"]));
    }

    #[test]
    fn stitch_validates_inputs() {
        let model = VmdpModel::counterexample();
        let conts = vec![embed(&model, &MarkovPolicy::constant(&model, 0)); 2];
        assert!(matches!(
            stitch(&model, &History::new(vec![0, 0, 0, 0]), 0, &conts),
            Err(OracleError::NotDecisionEpoch { t: 4, .. })
        ));
        assert!(matches!(
            stitch(&model, &History::single(0), 7, &conts),
            Err(OracleError::InvalidAction { .. })
        ));
        assert!(matches!(
            stitch(&model, &History::single(0), 0, &conts[..1]),
            Err(OracleError::InvalidPolicy { .. })
        ));
    }

    #[test]
    fn property_p_fails_on_the_bundled_model() {
        let model = VmdpModel::counterexample();
        let report = check_property_p(&model, DEFAULT_CAP).unwrap();
        assert!(!report.holds);
        assert_eq!(report.policy_count, 64);
        let witness = rvs(&["1921/64", "-497/64"]);
        assert!(report
            .violations
            .iter()
            .any(|v| v.t == 1 && v.state == 0 && v.vector == witness));
        // one remaining decision is always realizable, so nothing can
        // go wrong at the last two epochs of this model
        assert!(report.violations.iter().all(|v| v.t == 1));
    }

    #[test]
    fn property_p_holds_on_the_deterministic_variant() {
        let model = VmdpModel::deterministic_variant();
        let report = check_property_p(&model, DEFAULT_CAP).unwrap();
        assert!(report.holds, "violations: {:?}", report.violations);
    }

    #[test]
    fn property_p_prime_holds_on_the_bundled_model() {
        let model = VmdpModel::counterexample();
        let report = check_property_p_prime(&model, DEFAULT_CAP).unwrap();
        assert!(report.holds, "violations: {:?}", report.violations);
        assert_eq!(report.policy_count, 16384);
    }

    #[test]
    fn witness_search_separates_the_policy_spaces() {
        let model = VmdpModel::counterexample();
        let target = rvs(&["30", "-7.8"]);
        let markov = find_witness_markov(&model, 1, 0, &target, MatchMode::Rounded(1), DEFAULT_CAP).unwrap();
        assert!(markov.is_none());
        let history =
            find_witness_history(&model, &History::single(0), &target, MatchMode::Rounded(1), DEFAULT_CAP)
                .unwrap();
        let policy = history.expect("attainable with history-dependent control");
        let values = evaluate_history(&model, &policy).unwrap();
        assert_eq!(values.value(1, &History::single(0)), &rvs(&["1921/64", "-497/64"]));
    }

    #[test]
    fn witness_search_finds_exact_markov_values() {
        let model = VmdpModel::counterexample();
        let target = rvs(&["1939/64", "-579/64"]);
        let witness = find_witness_markov(&model, 1, 0, &target, MatchMode::Exact, DEFAULT_CAP)
            .unwrap()
            .expect("all-a1 attains it");
        let values = evaluate_markov(&model, &witness).unwrap();
        assert_eq!(values.value(1, 0), &target);

        let exact_miss = rvs(&["1921/64", "-497/64"]);
        assert!(find_witness_markov(&model, 1, 0, &exact_miss, MatchMode::Exact, DEFAULT_CAP)
            .unwrap()
            .is_none());
    }

    #[test]
    fn value_sets_contain_markov_values_within_history_sets() {
        let model = VmdpModel::counterexample();
        let mv = v_sets_markov(&model, DEFAULT_CAP).unwrap();
        let hv = v_sets_history(&model, DEFAULT_CAP).unwrap();
        assert_eq!(hv.policy_count, 16384);
        for t in 1..=model.horizon() {
            for h in History::all(t, model.num_states()) {
                let v = mv.set(t, h.last());
                let vp = hv.set(t, &h);
                assert!(v.is_subset(vp), "V_t(s) must embed into V'_t(h_t)");
            }
        }
    }

    #[test]
    fn efficient_history_front_dominates_every_member() {
        // kernel property at (1, (s1)): every attainable vector is
        // dominated by an efficient one
        let model = VmdpModel::counterexample();
        let hv = v_sets_history(&model, DEFAULT_CAP).unwrap();
        let h = History::single(0);
        let front = hv.efficient(1, &h);
        for v in hv.set(1, &h) {
            assert!(
                front.iter().any(|u| crate::pareto::dominates(u, v)),
                "no efficient dominator for {v}"
            );
        }
    }

    #[test]
    fn deterministic_variant_fronts_coincide_across_routes() {
        let model = VmdpModel::deterministic_variant();
        let expected = ParetoSet::from_vectors(vec![
            RewardVector::from_ints(&[34, -15]),
            RewardVector::from_ints(&[26, 5]),
            RewardVector::from_ints(&[31, -4]),
            RewardVector::from_ints(&[23, 16]),
        ]);
        let mv = v_sets_markov(&model, DEFAULT_CAP).unwrap();
        assert_eq!(mv.efficient(1, 0), expected);
        let hv = v_sets_history(&model, DEFAULT_CAP).unwrap();
        assert_eq!(hv.efficient(1, &History::single(0)), expected);
    }

    #[test]
    fn constant_policy_requires_action_everywhere() {
        let model = VmdpModel::counterexample();
        let policy = MarkovPolicy::constant(&model, 1);
        let values = evaluate_markov(&model, &policy).unwrap();
        // all-a2: u_3(s1) = (9.5, 5.5); u_3(s2) = (5.5, -9.5)
        assert_eq!(values.value(3, 0), &rvs(&["19/2", "11/2"]));
        assert_eq!(values.value(3, 1), &rvs(&["11/2", "-19/2"]));
    }
}
