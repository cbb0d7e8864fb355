//! Model types: reward vectors, the VMDP itself, validation, structural
//! analysis and the JSON interchange format.
//!
//! A model has states `S`, per-state action sets `A_s`, decision epochs
//! `t = 1..N-1` and a terminal epoch `N`. Picking action `a` in state `s`
//! at epoch `t` earns the reward vector `R_t(s, a)` and moves to state `j`
//! with probability `p_t(j | s, a)`; ending in state `s` earns `R_N(s)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

pub type StateIdx = usize;
pub type ActionIdx = usize;

/// A point in objective space: one exact rational per objective.
///
/// Ordering is lexicographic, which fixes the canonical order used for
/// frontier listings and set comparisons throughout the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardVector(Vec<Rational>);

impl RewardVector {
    pub fn new(components: Vec<Rational>) -> Self {
        RewardVector(components)
    }

    pub fn from_ints(components: &[i64]) -> Self {
        RewardVector(components.iter().map(|&c| Rational::from_int(c)).collect())
    }

    /// Parses components like `"11"` or `"-19/4"`; panics on malformed
    /// input, so this is for fixtures and tests, not file loading.
    pub fn from_strs(components: &[&str]) -> Self {
        RewardVector(
            components
                .iter()
                .map(|c| c.parse().expect("malformed rational literal"))
                .collect(),
        )
    }

    pub fn zero(len: usize) -> Self {
        RewardVector(vec![Rational::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    /// Componentwise sum. Panics on dimension mismatch.
    pub fn add(&self, other: &RewardVector) -> RewardVector {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        RewardVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Every component multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> RewardVector {
        RewardVector(self.0.iter().map(|c| c * factor).collect())
    }

    /// Every component rounded to `places` decimals, halves away from zero.
    pub fn round_dp(&self, places: u32) -> RewardVector {
        RewardVector(self.0.iter().map(|c| c.round_dp(places)).collect())
    }
}

impl fmt::Display for RewardVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RewardVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact policy-space cardinality, or a marker that it stopped being
/// worth representing (beyond roughly `2^4096`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicyCount {
    Exact(BigUint),
    Huge,
}

impl PolicyCount {
    pub fn exceeds(&self, cap: u64) -> bool {
        match self {
            PolicyCount::Exact(n) => *n > BigUint::from(cap),
            PolicyCount::Huge => true,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            PolicyCount::Exact(n) => u64::try_from(n).ok(),
            PolicyCount::Huge => None,
        }
    }
}

impl fmt::Display for PolicyCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyCount::Exact(n) => write!(f, "{n}"),
            PolicyCount::Huge => write!(f, ">2^4096"),
        }
    }
}

const COUNT_BITS_LIMIT: u64 = 4096;

/// Structural facts about a validated model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelProperties {
    /// Rewards and transition rows identical at every decision epoch.
    pub is_stationary: bool,
    /// Every transition row puts probability 1 on a single successor.
    pub is_deterministic: bool,
    /// Number of deterministic Markov policies: `(prod_s |A_s|)^(N-1)`.
    pub markov_policy_count: PolicyCount,
    /// Number of deterministic history-dependent policies:
    /// `prod_{t<N} prod_{h_t} |A_{last(h_t)}|`.
    pub history_policy_count: PolicyCount,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    HorizonTooShort { horizon: usize },
    NoObjectives,
    NoStates,
    EmptyActionSet { state: String },
    DuplicateState { state: String },
    DuplicateAction { state: String, action: String },
    MissingReward { t: usize, state: String, action: String },
    MissingTransition { t: usize, state: String, action: String },
    MissingTerminal { state: String },
    RewardDimension { t: usize, state: String, action: String, expected: usize, got: usize },
    TerminalDimension { state: String, expected: usize, got: usize },
    TransitionRowLength { t: usize, state: String, action: String, expected: usize, got: usize },
    ProbabilityOutOfRange { t: usize, state: String, action: String, successor: String, value: Rational },
    TransitionRowSum { t: usize, state: String, action: String, sum: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::HorizonTooShort { horizon } => {
                write!(f, "horizon is {horizon}, need at least 2 (one decision epoch plus the terminal epoch)")
            }
            Violation::NoObjectives => write!(f, "objective count m must be at least 1"),
            Violation::NoStates => write!(f, "model has no states"),
            Violation::EmptyActionSet { state } => {
                write!(f, "state {state:?} has no actions")
            }
            Violation::DuplicateState { state } => {
                write!(f, "state {state:?} is listed more than once")
            }
            Violation::DuplicateAction { state, action } => {
                write!(f, "action {action:?} is listed more than once for state {state:?}")
            }
            Violation::MissingReward { t, state, action } => {
                write!(f, "no reward for (t={t}, s={state}, a={action})")
            }
            Violation::MissingTransition { t, state, action } => {
                write!(f, "no transition row for (t={t}, s={state}, a={action})")
            }
            Violation::MissingTerminal { state } => {
                write!(f, "no terminal reward for state {state:?}")
            }
            Violation::RewardDimension { t, state, action, expected, got } => {
                write!(f, "reward for (t={t}, s={state}, a={action}) has {got} components, expected {expected}")
            }
            Violation::TerminalDimension { state, expected, got } => {
                write!(f, "terminal reward for {state:?} has {got} components, expected {expected}")
            }
            Violation::TransitionRowLength { t, state, action, expected, got } => {
                write!(f, "transition row for (t={t}, s={state}, a={action}) has {got} entries, expected {expected}")
            }
            Violation::ProbabilityOutOfRange { t, state, action, successor, value } => {
                write!(f, "p(t={t}, {successor} | {state}, {action}) = {value} is outside [0, 1]")
            }
            Violation::TransitionRowSum { t, state, action, sum } => {
                write!(f, "transition row for (t={t}, s={state}, a={action}) sums to {sum}, expected 1")
            }
        }
    }
}

/// Everything `validate` found wrong; empty means the model is usable.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(|v| v.to_string()).collect()
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("failed to read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown state {state:?} in {context}")]
    UnknownState { state: String, context: String },
    #[error("unknown action {action:?} for state {state:?} in {context}")]
    UnknownAction { action: String, state: String, context: String },
    #[error("bad epoch key {key:?} in {context}: expected \"all\" or a decision epoch 1..={max}")]
    BadEpochKey { key: String, context: String, max: usize },
    #[error("duplicate entry for {context}")]
    Duplicate { context: String },
    #[error("horizon {horizon} exceeds the supported maximum of {max}")]
    HorizonTooLarge { horizon: usize, max: usize },
}

/// Largest horizon accepted from a model document. Stationary data is
/// materialized per decision epoch on load, so an untrusted file must
/// not be able to demand unbounded work from a few bytes of JSON.
pub const MAX_HORIZON: usize = 10_000;

/// A finite-horizon vector-valued MDP.
///
/// Instances built through the setters may be arbitrarily incomplete or
/// inconsistent; [`VmdpModel::validate`] reports every problem instead of
/// failing on the first one. The solver and oracles assume a model whose
/// report is clean.
#[derive(Debug, Clone, PartialEq)]
pub struct VmdpModel {
    m: usize,
    horizon: usize,
    states: Vec<String>,
    actions: Vec<Vec<String>>,
    rewards: BTreeMap<(usize, StateIdx, ActionIdx), RewardVector>,
    transitions: BTreeMap<(usize, StateIdx, ActionIdx), Vec<Rational>>,
    terminal: BTreeMap<StateIdx, RewardVector>,
}

impl VmdpModel {
    /// An empty shell: `m` objectives, horizon `N`, named states with
    /// their action menus, and no numerical data yet.
    pub fn new(m: usize, horizon: usize, states: Vec<String>, actions: Vec<Vec<String>>) -> Self {
        assert_eq!(states.len(), actions.len(), "one action menu per state");
        VmdpModel {
            m,
            horizon,
            states,
            actions,
            rewards: BTreeMap::new(),
            transitions: BTreeMap::new(),
            terminal: BTreeMap::new(),
        }
    }

    pub fn num_objectives(&self) -> usize {
        self.m
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Decision epochs, `1..=N-1`.
    pub fn decision_epochs(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.horizon.saturating_sub(1)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: StateIdx) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<StateIdx> {
        self.states.iter().position(|s| s == name)
    }

    pub fn actions(&self, s: StateIdx) -> &[String] {
        &self.actions[s]
    }

    pub fn num_actions(&self, s: StateIdx) -> usize {
        self.actions[s].len()
    }

    pub fn action_name(&self, s: StateIdx, a: ActionIdx) -> &str {
        &self.actions[s][a]
    }

    pub fn set_reward(&mut self, t: usize, s: StateIdx, a: ActionIdx, reward: RewardVector) {
        self.rewards.insert((t, s, a), reward);
    }

    /// `row[j] = p_t(j | s, a)` aligned with the state list.
    pub fn set_transition(&mut self, t: usize, s: StateIdx, a: ActionIdx, row: Vec<Rational>) {
        self.transitions.insert((t, s, a), row);
    }

    pub fn set_terminal(&mut self, s: StateIdx, reward: RewardVector) {
        self.terminal.insert(s, reward);
    }

    pub fn reward(&self, t: usize, s: StateIdx, a: ActionIdx) -> &RewardVector {
        self.rewards
            .get(&(t, s, a))
            .unwrap_or_else(|| panic!("no reward for (t={t}, s={s}, a={a}); validate first"))
    }

    pub fn transition_row(&self, t: usize, s: StateIdx, a: ActionIdx) -> &[Rational] {
        self.transitions
            .get(&(t, s, a))
            .map(Vec::as_slice)
            .unwrap_or_else(|| panic!("no transition row for (t={t}, s={s}, a={a}); validate first"))
    }

    pub fn transition(&self, t: usize, s: StateIdx, a: ActionIdx, j: StateIdx) -> &Rational {
        &self.transition_row(t, s, a)[j]
    }

    pub fn terminal_reward(&self, s: StateIdx) -> &RewardVector {
        self.terminal
            .get(&s)
            .unwrap_or_else(|| panic!("no terminal reward for state {s}; validate first"))
    }

    /// Checks every structural invariant and returns the full list of
    /// violations rather than stopping at the first.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        if self.m == 0 {
            violations.push(Violation::NoObjectives);
        }
        if self.horizon < 2 {
            violations.push(Violation::HorizonTooShort { horizon: self.horizon });
        }
        if self.states.is_empty() {
            violations.push(Violation::NoStates);
        }
        for (i, name) in self.states.iter().enumerate() {
            if self.states[..i].contains(name) {
                violations.push(Violation::DuplicateState { state: name.clone() });
            }
        }
        for (s, menu) in self.actions.iter().enumerate() {
            if menu.is_empty() {
                violations.push(Violation::EmptyActionSet { state: self.states[s].clone() });
            }
            for (i, name) in menu.iter().enumerate() {
                if menu[..i].contains(name) {
                    violations.push(Violation::DuplicateAction {
                        state: self.states[s].clone(),
                        action: name.clone(),
                    });
                }
            }
        }

        let zero = Rational::zero();
        let one = Rational::one();
        for t in self.decision_epochs() {
            for s in 0..self.states.len() {
                for a in 0..self.actions[s].len() {
                    let state = self.states[s].clone();
                    let action = self.actions[s][a].clone();
                    match self.rewards.get(&(t, s, a)) {
                        None => violations.push(Violation::MissingReward {
                            t,
                            state: state.clone(),
                            action: action.clone(),
                        }),
                        Some(r) if r.len() != self.m => violations.push(Violation::RewardDimension {
                            t,
                            state: state.clone(),
                            action: action.clone(),
                            expected: self.m,
                            got: r.len(),
                        }),
                        Some(_) => {}
                    }
                    match self.transitions.get(&(t, s, a)) {
                        None => violations.push(Violation::MissingTransition { t, state, action }),
                        Some(row) if row.len() != self.states.len() => {
                            violations.push(Violation::TransitionRowLength {
                                t,
                                state,
                                action,
                                expected: self.states.len(),
                                got: row.len(),
                            })
                        }
                        Some(row) => {
                            for (j, p) in row.iter().enumerate() {
                                if p < &zero || p > &one {
                                    violations.push(Violation::ProbabilityOutOfRange {
                                        t,
                                        state: state.clone(),
                                        action: action.clone(),
                                        successor: self.states[j].clone(),
                                        value: p.clone(),
                                    });
                                }
                            }
                            let sum: Rational = row.iter().sum();
                            if sum != one {
                                violations.push(Violation::TransitionRowSum { t, state, action, sum });
                            }
                        }
                    }
                }
            }
        }

        for s in 0..self.states.len() {
            match self.terminal.get(&s) {
                None => violations.push(Violation::MissingTerminal { state: self.states[s].clone() }),
                Some(r) if r.len() != self.m => violations.push(Violation::TerminalDimension {
                    state: self.states[s].clone(),
                    expected: self.m,
                    got: r.len(),
                }),
                Some(_) => {}
            }
        }

        ValidationReport { violations }
    }

    /// Structural analysis of a validated model.
    pub fn analyze(&self) -> ModelProperties {
        let one = Rational::one();
        let is_stationary = self.decision_epochs().skip(1).all(|t| {
            (0..self.states.len()).all(|s| {
                (0..self.actions[s].len()).all(|a| {
                    self.rewards.get(&(t, s, a)) == self.rewards.get(&(1, s, a))
                        && self.transitions.get(&(t, s, a)) == self.transitions.get(&(1, s, a))
                })
            })
        });
        let is_deterministic = self.transitions.values().all(|row| {
            row.iter().filter(|p| !p.is_zero()).count() == 1 && row.contains(&one)
        });
        ModelProperties {
            is_stationary,
            is_deterministic,
            markov_policy_count: self.markov_policy_count(),
            history_policy_count: self.history_policy_count(),
        }
    }

    pub fn markov_policy_count(&self) -> PolicyCount {
        let per_epoch: BigUint = self
            .actions
            .iter()
            .map(|menu| BigUint::from(menu.len()))
            .product();
        let epochs = self.horizon.saturating_sub(1) as u64;
        if per_epoch.is_one() || epochs == 0 {
            return PolicyCount::Exact(BigUint::one());
        }
        if per_epoch.bits().saturating_mul(epochs) > COUNT_BITS_LIMIT {
            return PolicyCount::Huge;
        }
        match pow_checked(&per_epoch, epochs) {
            Some(count) => PolicyCount::Exact(count),
            None => PolicyCount::Huge,
        }
    }

    pub fn history_policy_count(&self) -> PolicyCount {
        let mut count = BigUint::one();
        // histories of length t ending in s: |S|^(t-1) of them, each
        // contributing a free choice among |A_s| actions
        let mut prefixes: Option<u64> = Some(1);
        for _t in self.decision_epochs() {
            for menu in &self.actions {
                if menu.len() == 1 {
                    continue;
                }
                // a branching menu repeated over an uncountable number
                // of prefixes is huge by itself
                let reps = match prefixes {
                    Some(r) => r,
                    None => return PolicyCount::Huge,
                };
                let k = BigUint::from(menu.len());
                let extra_bits = k.bits().saturating_mul(reps);
                if count.bits().saturating_add(extra_bits) > COUNT_BITS_LIMIT {
                    return PolicyCount::Huge;
                }
                match pow_checked(&k, reps) {
                    Some(p) => count *= p,
                    None => return PolicyCount::Huge,
                }
            }
            prefixes = prefixes.and_then(|r| r.checked_mul(self.states.len() as u64));
        }
        PolicyCount::Exact(count)
    }

    /// The bundled two-state, two-action, horizon-4 model whose optimal
    /// frontier at epoch 1 strictly exceeds what Markov policies attain.
    pub fn counterexample() -> VmdpModel {
        let mut model = VmdpModel::new(
            2,
            4,
            vec!["s1".into(), "s2".into()],
            vec![vec!["a1".into(), "a2".into()], vec!["a1".into(), "a2".into()]],
        );
        let half = Rational::new(1, 2);
        for t in 1..=3 {
            model.set_reward(t, 0, 0, RewardVector::from_ints(&[11, -5]));
            model.set_reward(t, 0, 1, RewardVector::from_ints(&[9, 5]));
            model.set_reward(t, 1, 0, RewardVector::from_ints(&[5, 5]));
            model.set_reward(t, 1, 1, RewardVector::from_ints(&[5, -10]));
            model.set_transition(t, 0, 0, vec![Rational::new(3, 4), Rational::new(1, 4)]);
            model.set_transition(t, 0, 1, vec![half.clone(), half.clone()]);
            model.set_transition(t, 1, 0, vec![half.clone(), half.clone()]);
            model.set_transition(t, 1, 1, vec![half.clone(), half.clone()]);
        }
        model.set_terminal(0, RewardVector::from_ints(&[1, 0]));
        model.set_terminal(1, RewardVector::from_ints(&[0, 1]));
        model
    }

    /// Same rewards as [`VmdpModel::counterexample`], but with
    /// deterministic transitions: `a1` goes to `s1` and `a2` to `s2`
    /// from either state.
    pub fn deterministic_variant() -> VmdpModel {
        let mut model = VmdpModel::counterexample();
        let to_s1 = vec![Rational::one(), Rational::zero()];
        let to_s2 = vec![Rational::zero(), Rational::one()];
        for t in 1..=3 {
            model.set_transition(t, 0, 0, to_s1.clone());
            model.set_transition(t, 0, 1, to_s2.clone());
            model.set_transition(t, 1, 0, to_s1.clone());
            model.set_transition(t, 1, 1, to_s2.clone());
        }
        model
    }

    /// Parses a model document. Safe on untrusted input: horizons
    /// beyond [`MAX_HORIZON`] are rejected before any per-epoch table
    /// is materialized.
    pub fn from_json_str(text: &str) -> Result<VmdpModel, LoadError> {
        let file: ModelFile = serde_json::from_str(text)?;
        VmdpModel::from_file(file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<VmdpModel, LoadError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        VmdpModel::from_json_str(&text)
    }

    /// Canonical JSON rendering: keys sorted, stationary tables
    /// collapsed under `"all"`, numbers in canonical rational form.
    /// Loading it back reproduces the model exactly.
    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_file()).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn save_to_path(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json_string())
    }

    fn from_file(file: ModelFile) -> Result<VmdpModel, LoadError> {
        if file.horizon > MAX_HORIZON {
            return Err(LoadError::HorizonTooLarge { horizon: file.horizon, max: MAX_HORIZON });
        }
        let mut state_index = BTreeMap::new();
        for (i, name) in file.states.iter().enumerate() {
            if state_index.insert(name.clone(), i).is_some() {
                return Err(LoadError::Duplicate { context: format!("state {name:?}") });
            }
        }
        for name in file.actions.keys() {
            if !state_index.contains_key(name) {
                return Err(LoadError::UnknownState {
                    state: name.clone(),
                    context: "actions".into(),
                });
            }
        }
        let mut actions = Vec::with_capacity(file.states.len());
        for name in &file.states {
            let menu = file.actions.get(name).cloned().unwrap_or_default();
            for (i, action) in menu.iter().enumerate() {
                if menu[..i].contains(action) {
                    return Err(LoadError::Duplicate {
                        context: format!("action {action:?} of state {name:?}"),
                    });
                }
            }
            actions.push(menu);
        }

        let menus = actions.clone();
        let mut model = VmdpModel::new(file.m, file.horizon, file.states.clone(), actions);

        let lookup = |state: &str, action: &str, context: &str| -> Result<(StateIdx, ActionIdx), LoadError> {
            let s = *state_index.get(state).ok_or_else(|| LoadError::UnknownState {
                state: state.to_string(),
                context: context.to_string(),
            })?;
            let a = menus[s]
                .iter()
                .position(|x| x == action)
                .ok_or_else(|| LoadError::UnknownAction {
                    action: action.to_string(),
                    state: state.to_string(),
                    context: context.to_string(),
                })?;
            Ok((s, a))
        };

        let max_epoch = file.horizon.saturating_sub(1);
        let epochs_for = |key: &str, context: &str| -> Result<Vec<usize>, LoadError> {
            if key == "all" {
                return Ok((1..=max_epoch).collect());
            }
            match usize::from_str(key) {
                Ok(t) if (1..=max_epoch).contains(&t) => Ok(vec![t]),
                _ => Err(LoadError::BadEpochKey {
                    key: key.to_string(),
                    context: context.to_string(),
                    max: max_epoch,
                }),
            }
        };

        let mut seen_rewards = std::collections::BTreeSet::new();
        for (key, per_state) in &file.rewards {
            for (state, per_action) in per_state {
                for (action, value) in per_action {
                    let context = format!("rewards[{key:?}][{state:?}][{action:?}]");
                    let (s, a) = lookup(state, action, &context)?;
                    for t in epochs_for(key, &context)? {
                        if !seen_rewards.insert((t, s, a)) {
                            return Err(LoadError::Duplicate {
                                context: format!("reward (t={t}, s={state}, a={action})"),
                            });
                        }
                        model.set_reward(t, s, a, RewardVector::new(value.clone()));
                    }
                }
            }
        }

        let mut seen_transitions = std::collections::BTreeSet::new();
        for (key, per_state) in &file.transitions {
            for (state, per_action) in per_state {
                for (action, row) in per_action {
                    let context = format!("transitions[{key:?}][{state:?}][{action:?}]");
                    let (s, a) = lookup(state, action, &context)?;
                    let mut full_row = vec![Rational::zero(); file.states.len()];
                    let mut listed = vec![false; file.states.len()];
                    for (successor, p) in row {
                        let j = *state_index.get(successor).ok_or_else(|| LoadError::UnknownState {
                            state: successor.clone(),
                            context: context.clone(),
                        })?;
                        if listed[j] {
                            return Err(LoadError::Duplicate {
                                context: format!("{context} successor {successor:?}"),
                            });
                        }
                        listed[j] = true;
                        full_row[j] = p.clone();
                    }
                    for t in epochs_for(key, &context)? {
                        if !seen_transitions.insert((t, s, a)) {
                            return Err(LoadError::Duplicate {
                                context: format!("transition row (t={t}, s={state}, a={action})"),
                            });
                        }
                        model.set_transition(t, s, a, full_row.clone());
                    }
                }
            }
        }

        for (state, value) in &file.terminal {
            let s = *state_index.get(state).ok_or_else(|| LoadError::UnknownState {
                state: state.clone(),
                context: "terminal".into(),
            })?;
            model.set_terminal(s, RewardVector::new(value.clone()));
        }

        Ok(model)
    }

    fn to_file(&self) -> ModelFile {
        let decision_epochs: Vec<usize> = self.decision_epochs().collect();
        let stationary = !decision_epochs.is_empty()
            && decision_epochs.iter().all(|&t| {
                (0..self.states.len()).all(|s| {
                    (0..self.actions[s].len()).all(|a| {
                        self.rewards.get(&(t, s, a)) == self.rewards.get(&(decision_epochs[0], s, a))
                            && self.transitions.get(&(t, s, a))
                                == self.transitions.get(&(decision_epochs[0], s, a))
                    })
                })
            });
        let keys: Vec<(String, usize)> = if stationary {
            vec![("all".to_string(), decision_epochs[0])]
        } else {
            decision_epochs.iter().map(|&t| (t.to_string(), t)).collect()
        };

        let mut rewards: EpochTable<Vec<Rational>> = BTreeMap::new();
        let mut transitions: EpochTable<BTreeMap<String, Rational>> = BTreeMap::new();
        for (key, t) in &keys {
            for s in 0..self.states.len() {
                for a in 0..self.actions[s].len() {
                    if let Some(r) = self.rewards.get(&(*t, s, a)) {
                        rewards
                            .entry(key.clone())
                            .or_default()
                            .entry(self.states[s].clone())
                            .or_default()
                            .insert(self.actions[s][a].clone(), r.components().to_vec());
                    }
                    if let Some(row) = self.transitions.get(&(*t, s, a)) {
                        let sparse: BTreeMap<String, Rational> = row
                            .iter()
                            .enumerate()
                            .filter(|(_, p)| !p.is_zero())
                            .map(|(j, p)| (self.states[j].clone(), p.clone()))
                            .collect();
                        transitions
                            .entry(key.clone())
                            .or_default()
                            .entry(self.states[s].clone())
                            .or_default()
                            .insert(self.actions[s][a].clone(), sparse);
                    }
                }
            }
        }

        ModelFile {
            m: self.m,
            horizon: self.horizon,
            states: self.states.clone(),
            actions: self
                .states
                .iter()
                .zip(&self.actions)
                .map(|(s, menu)| (s.clone(), menu.clone()))
                .collect(),
            stationary,
            rewards,
            transitions,
            terminal: self
                .terminal
                .iter()
                .map(|(&s, r)| (self.states[s].clone(), r.components().to_vec()))
                .collect(),
        }
    }
}

fn pow_checked(base: &BigUint, exp: u64) -> Option<BigUint> {
    let exp32 = u32::try_from(exp).ok()?;
    Some(num_traits::Pow::pow(base, exp32))
}

type EpochTable<V> = BTreeMap<String, BTreeMap<String, BTreeMap<String, V>>>;

/// On-disk JSON layout. Epoch keys are `"all"` or decision epoch
/// numbers; transition rows are sparse maps from successor name to
/// probability.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    m: usize,
    horizon: usize,
    states: Vec<String>,
    actions: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    stationary: bool,
    #[serde(default)]
    rewards: EpochTable<Vec<Rational>>,
    #[serde(default)]
    transitions: EpochTable<BTreeMap<String, Rational>>,
    #[serde(default)]
    terminal: BTreeMap<String, Vec<Rational>>,
}
