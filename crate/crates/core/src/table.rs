//! Budget-indexed composition shared by the exact and approximate solvers.

use rayon::prelude::*;

use crate::pareto::{filter_nondominated, ParetoItem};

/// Per-budget label sets of one tree node; index `x` holds `L(H, x)`.
pub(crate) type Sets<T> = Vec<Vec<T>>;

/// `L(H,x) = filter(⋃_{k=0..x} combine(L(H₁,k), L(H₂,x−k)))` for every `x`.
///
/// Budget indices are independent and run in parallel; the result does not
/// depend on scheduling. Returns the sets and the number of candidate labels
/// created before filtering.
pub(crate) fn compose<T, F>(left: &Sets<T>, right: &Sets<T>, combine: F) -> (Sets<T>, u64)
where
    T: ParetoItem + Send + Sync,
    F: Fn(&[T], &[T]) -> Vec<T> + Sync,
{
    debug_assert_eq!(left.len(), right.len());
    let per_budget: Vec<(Vec<T>, u64)> = (0..left.len())
        .into_par_iter()
        .map(|x| {
            let mut candidates = Vec::new();
            for k in 0..=x {
                candidates.extend(combine(&left[k], &right[x - k]));
            }
            let created = candidates.len() as u64;
            (filter_nondominated(candidates), created)
        })
        .collect();
    let created = per_budget.iter().map(|(_, c)| c).sum();
    (per_budget.into_iter().map(|(s, _)| s).collect(), created)
}
