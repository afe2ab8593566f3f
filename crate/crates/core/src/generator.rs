//! Seeded instance generation.
//!
//! The generator is SplitMix64 (`rand_xoshiro::SplitMix64`): the state
//! starts at the seed, each step adds `0x9e3779b97f4a7c15` and the output is
//! the standard SplitMix64 finalizer of the new state. A draw from the
//! inclusive range `[lo, hi]` is `lo + next_u64() % (hi − lo + 1)`; a coin
//! flip is `next_u64() & 1`. Draws happen in the order documented on each
//! function, so a port of these few lines reproduces every instance.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::knapsack::{knapsack_to_bmfni, parallel_tree, KnapsackDecisionInstance, KnapsackItem};
use crate::model::{ArcAttrs, Instance, Topology, ValuePair, VALUE_CAP};
use crate::sp::{NodeId, SpTree, SpTreeBuilder};

/// Seeded draw source; see the module docs for the exact draws.
#[derive(Debug, Clone)]
pub struct Draws(SplitMix64);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish in `[lo, hi]` (modulo reduction).
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        match (hi - lo).checked_add(1) {
            Some(span) => lo + self.next_u64() % span,
            None => self.next_u64(),
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetRule {
    Fixed(u64),
    /// `⌊Σc · num / den⌋`.
    FractionOfTotalCost { num: u64, den: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpParams {
    pub arcs: usize,
    pub seed: u64,
    pub max_capacity: u64,
    pub max_cost: u64,
    pub budget: BudgetRule,
}

/// Random binary tree with `m` leaves numbered left to right. Draw order,
/// pre-order: at a node with `n > 1` leaves, the left size in `[1, n−1]`,
/// then the coin (heads = series), then the left subtree, then the right.
pub fn random_tree(m: usize, draws: &mut Draws) -> SpTree {
    fn build(n: usize, next_arc: &mut usize, draws: &mut Draws, b: &mut SpTreeBuilder) -> NodeId {
        if n == 1 {
            let id = b.leaf(*next_arc);
            *next_arc += 1;
            return id;
        }
        let left = draws.range(1, n as u64 - 1) as usize;
        let series = draws.coin();
        let l = build(left, next_arc, draws, b);
        let r = build(n - left, next_arc, draws, b);
        if series {
            b.series(l, r)
        } else {
            b.parallel(l, r)
        }
    }
    let mut b = SpTreeBuilder::new();
    let mut next_arc = 0;
    let root = build(m, &mut next_arc, draws, &mut b);
    b.finish(root)
}

/// Random instance: the tree first, then per arc `a1..am` in order its
/// first capacity, second capacity and cost.
pub fn gen_sp(params: &SpParams) -> Result<Instance> {
    let m = params.arcs;
    if m == 0 {
        return Err(Error::InvalidParameter("arc count must be at least 1".into()));
    }
    if params.max_cost == 0 {
        return Err(Error::InvalidParameter("maximum cost must be at least 1".into()));
    }
    if let BudgetRule::FractionOfTotalCost { den: 0, .. } = params.budget {
        return Err(Error::InvalidParameter("budget fraction has zero denominator".into()));
    }
    if (m as u128) * (params.max_capacity as u128) > VALUE_CAP as u128
        || (m as u128) * (params.max_cost as u128) > VALUE_CAP as u128
    {
        return Err(Error::Overflow("m·maxU or m·maxCost exceeds 2^60"));
    }

    let mut draws = Draws::new(params.seed);
    let tree = random_tree(m, &mut draws);
    let arcs: Vec<ArcAttrs> = (0..m)
        .map(|i| {
            let u1 = draws.range(0, params.max_capacity);
            let u2 = draws.range(0, params.max_capacity);
            let c = draws.range(1, params.max_cost);
            ArcAttrs::new(format!("a{}", i + 1), u1, u2, c)
        })
        .collect();
    let total: u64 = arcs.iter().map(|a| a.cost).sum();
    let budget = match params.budget {
        BudgetRule::Fixed(b) => b,
        BudgetRule::FractionOfTotalCost { num, den } => (total as u128 * num as u128 / den as u128) as u64,
    };
    let instance = Instance::new(arcs, Topology::Tree(tree), budget);
    instance.ensure_valid()?;
    Ok(instance)
}

/// Parallel arcs with `u(a_i) = (2^i, 2^{m−i})`, unit costs, budget `m`.
///
/// With budget `m` every arc can be cut, so the front is the single point
/// `(0,0)`; [`gen_hard_parallel_with_budget`] gives the same arcs under a
/// smaller budget, where the front grows with `m`.
pub fn gen_hard_parallel(m: usize) -> Result<Instance> {
    gen_hard_parallel_with_budget(m, m as u64)
}

pub fn gen_hard_parallel_with_budget(m: usize, budget: u64) -> Result<Instance> {
    if m < 2 {
        return Err(Error::InvalidParameter("hard family needs at least 2 arcs".into()));
    }
    if m >= 60 || (m as u128) << m > VALUE_CAP as u128 {
        return Err(Error::Overflow("m·2^m exceeds 2^60"));
    }
    let arcs = (1..=m)
        .map(|i| ArcAttrs::new(format!("a{i}"), 1 << i, 1 << (m - i), 1))
        .collect();
    Ok(Instance::new(arcs, Topology::Tree(parallel_tree(m)), budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionParams {
    pub items: usize,
    pub seed: u64,
    pub max_profit: u64,
    pub max_weight: u64,
}

#[derive(Debug, Clone)]
pub struct GeneratedReduction {
    pub knapsack: KnapsackDecisionInstance,
    pub instance: Instance,
    pub threshold: ValuePair,
}

/// Random knapsack decision instance pushed through [`knapsack_to_bmfni`].
/// Draw order: per item its profit in `[1, maxP]` then its weight in
/// `[1, maxW]`; then `P` in `[1, Σp]` and `W` in `[1, Σw]`.
pub fn gen_reduction(params: &ReductionParams) -> Result<GeneratedReduction> {
    if params.items == 0 {
        return Err(Error::InvalidParameter("item count must be at least 1".into()));
    }
    if params.max_profit == 0 || params.max_weight == 0 {
        return Err(Error::InvalidParameter("maximum profit and weight must be at least 1".into()));
    }
    let mut draws = Draws::new(params.seed);
    let items: Vec<KnapsackItem> = (0..params.items)
        .map(|_| {
            let profit = draws.range(1, params.max_profit);
            let weight = draws.range(1, params.max_weight);
            KnapsackItem { profit, weight }
        })
        .collect();
    let p_sum = items.iter().try_fold(0u64, |s, i| s.checked_add(i.profit));
    let w_sum = items.iter().try_fold(0u64, |s, i| s.checked_add(i.weight));
    let (Some(p_sum), Some(w_sum)) = (p_sum, w_sum) else {
        return Err(Error::Overflow("knapsack totals exceed 2^64"));
    };
    let knapsack = KnapsackDecisionInstance {
        items,
        profit_target: draws.range(1, p_sum),
        weight_limit: draws.range(1, w_sum),
    };
    let (instance, threshold) = knapsack_to_bmfni(&knapsack)?;
    Ok(GeneratedReduction {
        knapsack,
        instance,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, seed: u64) -> SpParams {
        SpParams {
            arcs: m,
            seed,
            max_capacity: 20,
            max_cost: 3,
            budget: BudgetRule::FractionOfTotalCost { num: 1, den: 3 },
        }
    }

    #[test]
    fn splitmix_reference_outputs() {
        // published SplitMix64 outputs for seed 1234567
        let mut d = Draws::new(1234567);
        let got: Vec<u64> = (0..3).map(|_| d.next_u64()).collect();
        assert_eq!(
            got,
            [6457827717110365317, 3203168211198807973, 9817491932198370423]
        );
    }

    #[test]
    fn single_arc_is_a_primitive() {
        let inst = gen_sp(&params(1, 7)).unwrap();
        assert_eq!(format!("{:?}", inst.tree().unwrap()), "0");
    }

    #[test]
    fn same_seed_same_instance() {
        let a = gen_sp(&params(5, 42)).unwrap();
        let b = gen_sp(&params(5, 42)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_sp(&params(5, 43)).unwrap());
    }

    #[test]
    fn generated_instances_are_valid_and_in_range() {
        for seed in 0..200 {
            let inst = gen_sp(&params(1 + seed as usize % 15, seed)).unwrap();
            assert!(inst.validate().is_empty());
            for a in &inst.arcs {
                assert!(a.u1 <= 20 && a.u2 <= 20 && (1..=3).contains(&a.cost));
            }
            assert_eq!(inst.budget, inst.total_cost() / 3);
            assert_eq!(inst.tree().unwrap().arc_count(), inst.arc_count());
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(gen_sp(&params(0, 1)).is_err());
        let mut p = params(3, 1);
        p.max_cost = 0;
        assert!(gen_sp(&p).is_err());
        assert!(gen_hard_parallel(1).is_err());
        assert!(gen_hard_parallel(60).is_err());
        assert!(gen_reduction(&ReductionParams { items: 0, seed: 0, max_profit: 5, max_weight: 5 }).is_err());
    }

    #[test]
    fn hard_family_formula() {
        let inst = gen_hard_parallel(2).unwrap();
        let caps: Vec<(u64, u64)> = inst.arcs.iter().map(|a| (a.u1, a.u2)).collect();
        assert_eq!(caps, [(2, 2), (4, 1)]);
        assert_eq!(inst.budget, 2);
        assert!(inst.tree().unwrap().is_parallel_only());
        assert!(gen_hard_parallel(50).is_ok());
    }

    #[test]
    fn reduction_is_deterministic_and_in_range() {
        let p = ReductionParams {
            items: 6,
            seed: 9,
            max_profit: 10,
            max_weight: 10,
        };
        let a = gen_reduction(&p).unwrap();
        let b = gen_reduction(&p).unwrap();
        assert_eq!(a.knapsack, b.knapsack);
        assert_eq!(a.instance, b.instance);
        let p_sum: u64 = a.knapsack.items.iter().map(|i| i.profit).sum();
        assert!((1..=p_sum).contains(&a.knapsack.profit_target));
        assert_eq!(a.instance.arc_count(), 12);
    }
}
