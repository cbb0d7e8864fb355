//! Pareto dominance and operations on finite sets of reward vectors.
//!
//! Dominance is componentwise and reflexive: `x` dominates `y` when
//! `x_i >= y_i` for every objective. The efficient subset keeps a vector
//! unless some *other* vector dominates it, so duplicates collapse and
//! the result is an antichain: no member dominates another.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::RewardVector;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParetoError {
    #[error("empty input set")]
    EmptyInput,
    #[error("negative scaling factor {0}")]
    NegativeScale(Rational),
}

/// `x >= y` in every component. Panics on dimension mismatch.
pub fn dominates(x: &RewardVector, y: &RewardVector) -> bool {
    assert_eq!(x.len(), y.len(), "dominance requires equal dimension");
    x.components().iter().zip(y.components()).all(|(a, b)| a >= b)
}

/// A finite set of reward vectors in canonical (lexicographic) order
/// with duplicates removed.
///
/// Construction sorts and dedups; it does not filter, so a `ParetoSet`
/// is only an antichain when it came out of [`efficient_subset`].
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(transparent)]
pub struct ParetoSet {
    vectors: Vec<RewardVector>,
}

impl ParetoSet {
    pub fn from_vectors(mut vectors: Vec<RewardVector>) -> Self {
        vectors.sort();
        vectors.dedup();
        ParetoSet { vectors }
    }

    pub fn singleton(vector: RewardVector) -> Self {
        ParetoSet { vectors: vec![vector] }
    }

    pub fn vectors(&self) -> &[RewardVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, vector: &RewardVector) -> bool {
        self.vectors.binary_search(vector).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RewardVector> {
        self.vectors.iter()
    }
}

impl<'a> IntoIterator for &'a ParetoSet {
    type Item = &'a RewardVector;
    type IntoIter = std::slice::Iter<'a, RewardVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.vectors.iter()
    }
}

impl FromIterator<RewardVector> for ParetoSet {
    fn from_iter<I: IntoIterator<Item = RewardVector>>(iter: I) -> Self {
        ParetoSet::from_vectors(iter.into_iter().collect())
    }
}

/// The vectors of `input` not dominated by any other vector of `input`.
/// Duplicates count as one vector. Errors on empty input.
pub fn efficient_subset(input: &[RewardVector]) -> Result<ParetoSet, ParetoError> {
    if input.is_empty() {
        return Err(ParetoError::EmptyInput);
    }
    let distinct: Vec<&RewardVector> = input.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let keep: Vec<RewardVector> = distinct
        .iter()
        .filter(|x| !distinct.iter().any(|y| y != *x && dominates(y, x)))
        .map(|x| (*x).clone())
        .collect();
    // distinct is sorted, so keep already is too
    Ok(ParetoSet { vectors: keep })
}

/// `{x + y : x in a, y in b}` in canonical order. Errors if either
/// operand is empty.
pub fn minkowski_sum(a: &[RewardVector], b: &[RewardVector]) -> Result<Vec<RewardVector>, ParetoError> {
    if a.is_empty() || b.is_empty() {
        return Err(ParetoError::EmptyInput);
    }
    let sums: BTreeSet<RewardVector> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x.add(y)))
        .collect();
    Ok(sums.into_iter().collect())
}

/// `{p * x : x in input}` in canonical order. Errors on negative `p`;
/// `p = 0` collapses everything to the zero vector.
pub fn scale_set(p: &Rational, input: &[RewardVector]) -> Result<Vec<RewardVector>, ParetoError> {
    if p.is_negative() {
        return Err(ParetoError::NegativeScale(p.clone()));
    }
    let scaled: BTreeSet<RewardVector> = input.iter().map(|x| x.scaled(p)).collect();
    Ok(scaled.into_iter().collect())
}

/// Exact set equality (order and multiplicity already canonicalized).
pub fn sets_equal(a: &ParetoSet, b: &ParetoSet) -> bool {
    a == b
}

/// Every vector rounded componentwise to `places` decimals, listed in
/// the canonical order of the rounded vectors. Rounding can merge
/// distinct exact vectors; duplicates are kept so the count is
/// preserved.
pub fn round_set(set: &ParetoSet, places: u32) -> Vec<RewardVector> {
    let mut rounded: Vec<RewardVector> = set.iter().map(|v| v.round_dp(places)).collect();
    rounded.sort();
    rounded
}
