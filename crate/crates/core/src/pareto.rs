//! Pareto-set algebra on planar integer points: dominance filtering, the
//! Minkowski sum `⊕` (parallel composition) and the componentwise-minimum
//! combination `⊙` (series composition).

use crate::error::{Error, Result};
use crate::model::{Strategy, ValuePair};
use crate::rounding::Epsilon;

/// A flow-value pair together with a strategy attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPoint {
    pub value: ValuePair,
    pub witness: Strategy,
}

impl LabeledPoint {
    pub fn new(value: ValuePair, witness: Strategy) -> Self {
        Self { value, witness }
    }
}

/// Anything that can be dominance-filtered: a planar key under
/// minimization plus a witness used to break ties between equal keys.
pub trait ParetoItem {
    fn key(&self) -> (u64, u64);
    fn witness(&self) -> &Strategy;
}

impl ParetoItem for LabeledPoint {
    fn key(&self) -> (u64, u64) {
        (self.value.v1, self.value.v2)
    }

    fn witness(&self) -> &Strategy {
        &self.witness
    }
}

/// Minimal elements under componentwise `≤`, one per distinct key.
///
/// Among equal keys the lexicographically smallest witness survives. The
/// output is sorted by first component ascending, second strictly
/// descending.
pub fn filter_nondominated<T: ParetoItem>(mut items: Vec<T>) -> Vec<T> {
    items.sort_by(|a, b| a.key().cmp(&b.key()).then_with(|| a.witness().cmp(b.witness())));
    let mut out: Vec<T> = Vec::with_capacity(items.len().min(64));
    let mut best_second = u64::MAX;
    for item in items {
        let (_, second) = item.key();
        // sorted by first component, so a survivor must strictly improve
        // the second one; this also drops later duplicates
        if second < best_second {
            best_second = second;
            out.push(item);
        }
    }
    out
}

/// Maximal elements under componentwise `≥` (the knapsack mirror of
/// [`filter_nondominated`]). Sorted by first component descending, second
/// strictly ascending; ties keep the lexicographically smallest witness.
pub fn filter_maximal<T: ParetoItem>(mut items: Vec<T>) -> Vec<T> {
    items.sort_by(|a, b| b.key().cmp(&a.key()).then_with(|| a.witness().cmp(b.witness())));
    let mut out: Vec<T> = Vec::new();
    let mut best_second: Option<u64> = None;
    for item in items {
        let (_, second) = item.key();
        if best_second.is_none_or(|b| second > b) {
            best_second = Some(second);
            out.push(item);
        }
    }
    out
}

/// `A ⊕ B`: all pairwise sums, witnesses joined. Not filtered.
pub fn minkowski_sum(a: &[LabeledPoint], b: &[LabeledPoint]) -> Result<Vec<LabeledPoint>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            let value = p
                .value
                .checked_add(&q.value)
                .ok_or(Error::Overflow("minkowski sum"))?;
            out.push(LabeledPoint::new(value, p.witness.disjoint_union(&q.witness)));
        }
    }
    Ok(out)
}

/// `A ⊙ B`: all pairwise componentwise minima, witnesses joined. Not
/// filtered.
pub fn min_combine(a: &[LabeledPoint], b: &[LabeledPoint]) -> Vec<LabeledPoint> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            out.push(LabeledPoint::new(
                p.value.componentwise_min(&q.value),
                p.witness.disjoint_union(&q.witness),
            ));
        }
    }
    out
}

/// Whether some `q` in `front` satisfies `q ≦ (1+ε)·p`.
pub fn eps_covers(front: &[ValuePair], p: &ValuePair, eps: Epsilon) -> bool {
    front
        .iter()
        .any(|q| eps.within(q.v1, p.v1) && eps.within(q.v2, p.v2))
}
