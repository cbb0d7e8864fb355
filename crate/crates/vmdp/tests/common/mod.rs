//! Shared machinery for the randomized suites: a seeded model
//! generator and assertion bodies reused by both the granular property
//! tests and the acceptance gate. Every panic message carries the
//! offending model as JSON so failures replay directly.

// not every test target exercises every helper
#![allow(dead_code)]

use std::ops::RangeInclusive;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vmdp::model::{ModelProperties, PolicyCount};
use vmdp::oracle::{
    check_property_p, evaluate_history, evaluate_markov, stitch, v_sets_history, v_sets_markov, embed,
    History, HistoryPolicy, MarkovPolicy, DEFAULT_CAP,
};
use vmdp::pareto::{dominates, efficient_subset};
use vmdp::recursion::{scalar_bellman, white_recursion};
use vmdp::{ParetoSet, Rational, RewardVector, VmdpModel};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone)]
pub struct Shape {
    pub horizon: RangeInclusive<usize>,
    pub objectives: RangeInclusive<usize>,
    pub states: RangeInclusive<usize>,
    pub actions: RangeInclusive<usize>,
    pub deterministic: bool,
    /// Resample until the Markov policy space is at most this large,
    /// keeping exhaustive suites inside a sane time budget.
    pub markov_budget: u64,
    /// Same for the history policy space; `u64::MAX` to ignore.
    pub history_budget: u64,
}

impl Shape {
    pub fn small_stochastic() -> Shape {
        Shape {
            horizon: 2..=3,
            objectives: 1..=3,
            states: 1..=3,
            actions: 1..=3,
            deterministic: false,
            markov_budget: 10_000,
            history_budget: u64::MAX,
        }
    }

    pub fn deterministic() -> Shape {
        Shape {
            horizon: 2..=5,
            objectives: 1..=3,
            states: 1..=3,
            actions: 1..=3,
            deterministic: true,
            markov_budget: 2_000,
            history_budget: u64::MAX,
        }
    }

    pub fn history_scale() -> Shape {
        Shape {
            horizon: 2..=3,
            objectives: 1..=2,
            states: 1..=3,
            actions: 1..=3,
            deterministic: false,
            markov_budget: 10_000,
            history_budget: 3_000,
        }
    }

    pub fn scalar() -> Shape {
        Shape { objectives: 1..=1, horizon: 2..=4, ..Shape::small_stochastic() }
    }
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let denom = [1, 1, 2, 4][rng.gen_range(0..4)];
    Rational::new(rng.gen_range(-40..=40), denom)
}

pub fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> RewardVector {
    RewardVector::new((0..m).map(|_| random_rational(rng)).collect())
}

fn random_row(rng: &mut ChaCha8Rng, num_states: usize, deterministic: bool) -> Vec<Rational> {
    if deterministic {
        let hit = rng.gen_range(0..num_states);
        return (0..num_states)
            .map(|j| if j == hit { Rational::one() } else { Rational::zero() })
            .collect();
    }
    let mut weights: Vec<i64> = (0..num_states).map(|_| rng.gen_range(0..=3)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..num_states)] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| Rational::new(w, total)).collect()
}

pub fn random_model(rng: &mut ChaCha8Rng, shape: &Shape) -> VmdpModel {
    for _ in 0..10_000 {
        let model = draw_model(rng, shape);
        if model.markov_policy_count().exceeds(shape.markov_budget)
            || model.history_policy_count().exceeds(shape.history_budget)
        {
            continue;
        }
        let report = model.validate();
        assert!(report.is_ok(), "generator produced an invalid model: {:?}", report.messages());
        return model;
    }
    panic!("could not draw a model within the policy budgets");
}

fn draw_model(rng: &mut ChaCha8Rng, shape: &Shape) -> VmdpModel {
    let horizon = rng.gen_range(shape.horizon.clone());
    let m = rng.gen_range(shape.objectives.clone());
    let num_states = rng.gen_range(shape.states.clone());
    let states: Vec<String> = (1..=num_states).map(|i| format!("s{i}")).collect();
    let actions: Vec<Vec<String>> = (0..num_states)
        .map(|_| {
            let count = rng.gen_range(shape.actions.clone());
            (1..=count).map(|i| format!("a{i}")).collect()
        })
        .collect();
    let mut model = VmdpModel::new(m, horizon, states, actions);
    let stationary = rng.gen_bool(0.5);
    for s in 0..num_states {
        for a in 0..model.num_actions(s) {
            let stationary_reward = random_vector(rng, m);
            let stationary_row = random_row(rng, num_states, shape.deterministic);
            for t in model.decision_epochs() {
                if stationary {
                    model.set_reward(t, s, a, stationary_reward.clone());
                    model.set_transition(t, s, a, stationary_row.clone());
                } else {
                    model.set_reward(t, s, a, random_vector(rng, m));
                    model.set_transition(t, s, a, random_row(rng, num_states, shape.deterministic));
                }
            }
        }
        model.set_terminal(s, random_vector(rng, m));
    }
    model
}

pub fn random_markov_policy(rng: &mut ChaCha8Rng, model: &VmdpModel) -> MarkovPolicy {
    let rules = model
        .decision_epochs()
        .map(|_| (0..model.num_states()).map(|s| rng.gen_range(0..model.num_actions(s))).collect())
        .collect();
    MarkovPolicy::new(rules)
}

pub fn random_history_policy(rng: &mut ChaCha8Rng, model: &VmdpModel) -> HistoryPolicy {
    let ns = model.num_states();
    let rules = model
        .decision_epochs()
        .map(|t| {
            (0..ns.pow(t as u32)).map(|rank| rng.gen_range(0..model.num_actions(rank % ns))).collect()
        })
        .collect();
    HistoryPolicy::new(ns, rules)
}

fn context(model: &VmdpModel) -> String {
    model.to_json_string()
}

/// Short-horizon models: the pre-filter sets stay attainable and the
/// recursion solves the Markov problem outright.
pub fn assert_small_horizon_validity(model: &VmdpModel) {
    let report = check_property_p(model, DEFAULT_CAP).unwrap();
    assert!(
        report.holds,
        "pre-filter left the attainable set on a short-horizon model\n{}",
        context(model)
    );
    let table = white_recursion(model);
    let v = v_sets_markov(model, DEFAULT_CAP).unwrap();
    for t in 1..=model.horizon() {
        for s in 0..model.num_states() {
            assert_eq!(
                table.frontier(t, s),
                &v.efficient(t, s),
                "recursion front differs from the enumerated front at (t={t}, s={s})\n{}",
                context(model)
            );
        }
    }
}

/// Deterministic dynamics: the recursion equals the enumerated Markov
/// fronts at every site, and the pre-filter never leaves the
/// attainable set.
pub fn assert_deterministic_validity(model: &VmdpModel) {
    assert!(model.analyze().is_deterministic);
    let report = check_property_p(model, DEFAULT_CAP).unwrap();
    assert!(
        report.holds,
        "pre-filter left the attainable set under deterministic dynamics\n{}",
        context(model)
    );
    let table = white_recursion(model);
    let v = v_sets_markov(model, DEFAULT_CAP).unwrap();
    for t in 1..=model.horizon() {
        for s in 0..model.num_states() {
            assert_eq!(
                table.frontier(t, s),
                &v.efficient(t, s),
                "deterministic recursion differs from enumeration at (t={t}, s={s})\n{}",
                context(model)
            );
        }
    }
}

/// A stitched policy's promised value must be reproduced exactly by
/// evaluating the stitched policy itself.
pub fn assert_stitch_round_trip(rng: &mut ChaCha8Rng, model: &VmdpModel) {
    let t = rng.gen_range(1..model.horizon());
    let h = History::new((0..t).map(|_| rng.gen_range(0..model.num_states())).collect());
    let a = rng.gen_range(0..model.num_actions(h.last()));
    let continuations: Vec<HistoryPolicy> =
        (0..model.num_states()).map(|_| random_history_policy(rng, model)).collect();
    let stitched = stitch(model, &h, a, &continuations).unwrap();
    let values = evaluate_history(model, &stitched.policy).unwrap();
    assert_eq!(
        values.value(t, &h),
        &stitched.value,
        "stitched policy does not realize its promised value at (t={t}, h={:?})\n{}",
        h.states(),
        context(model)
    );
}

/// On one objective the set recursion collapses to the classical
/// scalar recursion.
pub fn assert_scalar_agreement(model: &VmdpModel) {
    assert_eq!(model.num_objectives(), 1);
    let table = white_recursion(model);
    let scalars = scalar_bellman(model).unwrap();
    for t in 1..=model.horizon() {
        for s in 0..model.num_states() {
            let front = table.frontier(t, s);
            assert_eq!(front.len(), 1, "scalar front must be a single point\n{}", context(model));
            let value = front.iter().next().unwrap().get(0);
            assert_eq!(
                value,
                &scalars[&(t, s)],
                "set route and scalar route disagree at (t={t}, s={s})\n{}",
                context(model)
            );
        }
    }
}

/// Markov values embed into history values, efficient history fronts
/// depend on the history only through its last state and equal the
/// recursion's frontier there, every attainable vector has an efficient
/// dominator, and enumeration counts match the model's arithmetic.
pub fn assert_history_oracle_invariants(model: &VmdpModel) {
    let mv = v_sets_markov(model, DEFAULT_CAP).unwrap();
    let hv = v_sets_history(model, DEFAULT_CAP).unwrap();
    let props = model.analyze();
    assert_eq!(
        props.markov_policy_count,
        PolicyCount::Exact(mv.policy_count.into()),
        "Markov count arithmetic disagrees with enumeration\n{}",
        context(model)
    );
    assert_eq!(
        props.history_policy_count,
        PolicyCount::Exact(hv.policy_count.into()),
        "history count arithmetic disagrees with enumeration\n{}",
        context(model)
    );
    let table = white_recursion(model);
    for t in 1..=model.horizon() {
        let mut front_by_state: Vec<Option<ParetoSet>> = vec![None; model.num_states()];
        for h in History::all(t, model.num_states()) {
            let s = h.last();
            assert!(
                mv.set(t, s).is_subset(hv.set(t, &h)),
                "Markov values missing from history values at (t={t}, h={:?})\n{}",
                h.states(),
                context(model)
            );
            let front = hv.efficient(t, &h);
            assert_eq!(
                table.frontier(t, s),
                &front,
                "recursion frontier misses the efficient history front at (t={t}, h={:?})\n{}",
                h.states(),
                context(model)
            );
            for v in hv.set(t, &h) {
                assert!(
                    front.iter().any(|u| dominates(u, v)),
                    "no efficient dominator for {v} at (t={t}, h={:?})\n{}",
                    h.states(),
                    context(model)
                );
            }
            match &front_by_state[s] {
                None => front_by_state[s] = Some(front),
                Some(seen) => assert_eq!(
                    seen,
                    &front,
                    "efficient history front varies among histories ending in state {s} at t={t}\n{}",
                    context(model)
                ),
            }
        }
    }
}

/// Embedding a Markov policy must not change any value, at any history.
pub fn assert_embedding_consistency(model: &VmdpModel, policy: &MarkovPolicy) {
    let mv = evaluate_markov(model, policy).unwrap();
    let hv = evaluate_history(model, &embed(model, policy)).unwrap();
    for t in 1..=model.horizon() {
        for h in History::all(t, model.num_states()) {
            assert_eq!(
                hv.value(t, &h),
                mv.value(t, h.last()),
                "embedded policy value drifted at (t={t}, h={:?})\n{}",
                h.states(),
                context(model)
            );
        }
    }
}

/// The efficiency laws: selection, antichain, idempotence, kernel, and
/// the single-objective reduction to max.
pub fn assert_pareto_laws(vectors: &[RewardVector]) {
    let front = efficient_subset(vectors).unwrap();
    for u in front.iter() {
        assert!(vectors.contains(u), "front invented a vector: {u}");
    }
    for u in front.iter() {
        for w in front.iter() {
            assert!(!(dominates(u, w) && u != w), "front is not an antichain: {u} > {w}");
        }
    }
    let again = efficient_subset(front.vectors()).unwrap();
    assert_eq!(again, front, "efficiency is not idempotent");
    for v in vectors {
        assert!(
            front.iter().any(|u| dominates(u, v)),
            "no efficient dominator for {v}"
        );
    }
    if vectors.iter().all(|v| v.len() == 1) {
        let max = vectors.iter().max().unwrap();
        assert_eq!(front.vectors(), std::slice::from_ref(max), "m = 1 must reduce to the maximum");
    }
}

/// Random valid models survive a serialize/reload round trip.
pub fn assert_model_round_trip(model: &VmdpModel) {
    let text = model.to_json_string();
    let reloaded = VmdpModel::from_json_str(&text).unwrap();
    assert_eq!(&reloaded, model, "model changed across a JSON round trip\n{text}");
    let props: ModelProperties = model.analyze();
    assert_eq!(props, reloaded.analyze());
}
