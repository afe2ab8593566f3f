//! Knapsack connections.
//!
//! On a graph whose arcs all run from source to sink, interdicting a set of
//! arcs is the same as leaving the complementary set in a knapsack: the
//! remaining flow is the total capacity minus the profit of the interdicted
//! items, so efficient strategies are exactly the efficient item vectors of
//! a biobjective knapsack. In the other direction, a single-objective
//! knapsack decision question embeds into a parallel interdiction instance,
//! which is how hardness carries over.

use crate::error::{Error, Result};
use crate::model::{ArcAttrs, Instance, Strategy, Topology, ValuePair};
use crate::pareto::{filter_maximal, LabeledPoint};
use crate::sp::{SpTree, SpTreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BiItem {
    pub p1: u64,
    pub p2: u64,
    pub w: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiKnapsackInstance {
    pub items: Vec<BiItem>,
    pub capacity: u64,
}

impl BiKnapsackInstance {
    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::InvalidParameter("knapsack needs at least one item".into()));
        }
        if let Some(i) = self.items.iter().position(|it| it.w == 0) {
            return Err(Error::InvalidParameter(format!("item {i} has zero weight")));
        }
        let limit = crate::model::VALUE_CAP;
        let sum = |f: fn(&BiItem) -> u64| self.items.iter().try_fold(0u64, |s, it| s.checked_add(f(it)));
        for total in [sum(|i| i.p1), sum(|i| i.p2), sum(|i| i.w)] {
            match total {
                Some(t) if t <= limit => {}
                _ => return Err(Error::Overflow("knapsack totals exceed 2^60")),
            }
        }
        Ok(())
    }

    /// Profit of all items, `v(e)`.
    pub fn total_profit(&self) -> ValuePair {
        self.items
            .iter()
            .fold(ValuePair::ZERO, |s, it| ValuePair::new(s.v1 + it.p1, s.v2 + it.p2))
    }

    pub fn profit(&self, x: &Strategy) -> ValuePair {
        x.arcs().fold(ValuePair::ZERO, |s, i| {
            ValuePair::new(s.v1 + self.items[i].p1, s.v2 + self.items[i].p2)
        })
    }
}

/// Items per arc in arc order: profits are the capacities, weights the
/// costs, capacity the budget.
pub fn parallel_to_knapsack(instance: &Instance) -> Result<BiKnapsackInstance> {
    instance.ensure_valid()?;
    let parallel = match &instance.topology {
        Topology::Tree(t) => t.is_parallel_only(),
        Topology::Edges(list) => list
            .edges
            .iter()
            .all(|e| e.tail == list.source && e.head == list.sink),
    };
    if !parallel {
        return Err(Error::NotParallelGraph);
    }
    Ok(BiKnapsackInstance {
        items: instance
            .arcs
            .iter()
            .map(|a| BiItem {
                p1: a.u1,
                p2: a.u2,
                w: a.cost,
            })
            .collect(),
        capacity: instance.budget,
    })
}

/// All maximal profit pairs with an item vector attaining each (the
/// lexicographically smallest one), sorted by first profit descending.
///
/// Item-by-item DP where cell `w` holds the efficient points of weight at
/// most `w`.
pub fn solve_biknapsack(instance: &BiKnapsackInstance) -> Result<Vec<LabeledPoint>> {
    instance.validate()?;
    let n = instance.items.len();
    let total_weight: u64 = instance.items.iter().map(|i| i.w).sum();
    let cap = instance.capacity.min(total_weight) as usize;
    let empty = LabeledPoint::new(ValuePair::ZERO, Strategy::empty(n));
    let mut cells: Vec<Vec<LabeledPoint>> = vec![vec![empty]; cap + 1];
    for (i, item) in instance.items.iter().enumerate() {
        let w = item.w as usize;
        let next: Vec<Vec<LabeledPoint>> = (0..=cap)
            .map(|c| {
                let mut candidates = cells[c].clone();
                if c >= w {
                    candidates.extend(cells[c - w].iter().map(|p| {
                        let mut x = p.witness.clone();
                        x.insert(i, item.w);
                        let v = ValuePair::new(p.value.v1 + item.p1, p.value.v2 + item.p2);
                        LabeledPoint::new(v, x)
                    }));
                }
                filter_maximal(candidates)
            })
            .collect();
        cells = next;
    }
    Ok(cells.pop().expect("at least one cell"))
}

/// Interdiction front of a parallel instance from its knapsack front:
/// `VAL(γ) = v(e) − v(γ)`, sorted by first value ascending.
pub fn knapsack_front_to_interdiction(instance: &BiKnapsackInstance, efficient: &[LabeledPoint]) -> Vec<LabeledPoint> {
    let e = instance.total_profit();
    let mut out: Vec<LabeledPoint> = efficient
        .iter()
        .map(|p| LabeledPoint::new(ValuePair::new(e.v1 - p.value.v1, e.v2 - p.value.v2), p.witness.clone()))
        .collect();
    out.sort_by_key(|p| p.value);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnapsackItem {
    pub profit: u64,
    pub weight: u64,
}

/// "Is there a subset with profit at least `profit_target` and weight at
/// most `weight_limit`?"
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackDecisionInstance {
    pub items: Vec<KnapsackItem>,
    pub profit_target: u64,
    pub weight_limit: u64,
}

impl KnapsackDecisionInstance {
    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::InvalidParameter("knapsack needs at least one item".into()));
        }
        if let Some(i) = self.items.iter().position(|it| it.profit == 0 || it.weight == 0) {
            return Err(Error::InvalidParameter(format!(
                "item {i}: profits and weights must be positive"
            )));
        }
        if self.profit_target == 0 || self.weight_limit == 0 {
            return Err(Error::InvalidParameter("thresholds must be positive".into()));
        }
        let n = self.items.len() as u128;
        let p_max = self.items.iter().map(|i| i.profit).max().unwrap_or(0) as u128;
        let w_sum: u128 = self.items.iter().map(|i| i.weight as u128).sum();
        if 2 * n * p_max > crate::model::VALUE_CAP as u128 || 2 * n * w_sum > crate::model::VALUE_CAP as u128 {
            return Err(Error::Overflow("knapsack values exceed 2^60"));
        }
        if self.profit_target as u128 > n * p_max {
            return Err(Error::InvalidParameter(
                "profit target exceeds item count times largest profit".into(),
            ));
        }
        Ok(())
    }
}

/// Parallel instance with arcs `a1..an` then `b1..bn`:
/// `u(a_i) = (p_max − p_i, w_i)`, `u(b_i) = (p_max, 0)`, unit costs,
/// budget `n`. The knapsack answer is yes iff some strategy reaches a value
/// `≦ (n·p_max − P, W)`, which is returned as the threshold.
pub fn knapsack_to_bmfni(kd: &KnapsackDecisionInstance) -> Result<(Instance, ValuePair)> {
    kd.validate()?;
    let n = kd.items.len();
    let p_max = kd.items.iter().map(|i| i.profit).max().expect("nonempty");
    let mut arcs = Vec::with_capacity(2 * n);
    for (i, it) in kd.items.iter().enumerate() {
        arcs.push(ArcAttrs::new(format!("a{}", i + 1), p_max - it.profit, it.weight, 1));
    }
    for i in 0..n {
        arcs.push(ArcAttrs::new(format!("b{}", i + 1), p_max, 0, 1));
    }
    let instance = Instance::new(arcs, Topology::Tree(parallel_tree(2 * n)), n as u64);
    let threshold = ValuePair::new(n as u64 * p_max - kd.profit_target, kd.weight_limit);
    Ok((instance, threshold))
}

/// Left-folded parallel composition of arcs `0..m`.
pub(crate) fn parallel_tree(m: usize) -> SpTree {
    let mut b = SpTreeBuilder::new();
    let mut root = b.leaf(0);
    for a in 1..m {
        let leaf = b.leaf(a);
        root = b.parallel(root, leaf);
    }
    b.finish(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{decision_check, solve_exact};
    use crate::sp::parse_sp_expression;

    fn biknap(items: &[(u64, u64, u64)], capacity: u64) -> BiKnapsackInstance {
        BiKnapsackInstance {
            items: items.iter().map(|&(p1, p2, w)| BiItem { p1, p2, w }).collect(),
            capacity,
        }
    }

    fn values(points: &[LabeledPoint]) -> Vec<(u64, u64)> {
        points.iter().map(|p| (p.value.v1, p.value.v2)).collect()
    }

    #[test]
    fn parallel_instance_maps_field_by_field() {
        let p = parse_sp_expression("P(arc(a),arc(b))").unwrap();
        let inst = Instance::new(
            vec![ArcAttrs::new("a", 2, 1, 1), ArcAttrs::new("b", 1, 3, 1)],
            Topology::Tree(p.tree),
            1,
        );
        assert_eq!(parallel_to_knapsack(&inst).unwrap(), biknap(&[(2, 1, 1), (1, 3, 1)], 1));
    }

    #[test]
    fn series_graph_is_rejected() {
        let p = parse_sp_expression("S(arc(a),arc(b))").unwrap();
        let inst = Instance::new(
            vec![ArcAttrs::new("a", 2, 1, 1), ArcAttrs::new("b", 1, 3, 1)],
            Topology::Tree(p.tree),
            1,
        );
        assert!(matches!(parallel_to_knapsack(&inst), Err(Error::NotParallelGraph)));
    }

    #[test]
    fn biknapsack_examples() {
        let k = biknap(&[(2, 1, 1), (1, 3, 1)], 1);
        assert_eq!(values(&solve_biknapsack(&k).unwrap()), vec![(2, 1), (1, 3)]);

        let k = biknap(&[(2, 1, 1), (1, 3, 2), (4, 4, 1)], 10);
        assert_eq!(values(&solve_biknapsack(&k).unwrap()), vec![(7, 8)]);

        let k = biknap(&[(2, 1, 1), (1, 3, 2)], 0);
        let front = solve_biknapsack(&k).unwrap();
        assert_eq!(values(&front), vec![(0, 0)]);
        assert!(front[0].witness.is_empty());
    }

    #[test]
    fn knapsack_front_maps_to_interdiction_front() {
        let p = parse_sp_expression("P(arc(a),arc(b),arc(c),arc(d))").unwrap();
        let arcs = vec![
            ArcAttrs::new("a", 5, 1, 1),
            ArcAttrs::new("b", 2, 6, 2),
            ArcAttrs::new("c", 3, 3, 1),
            ArcAttrs::new("d", 1, 4, 2),
        ];
        let inst = Instance::new(arcs, Topology::Tree(p.tree), 3);
        let k = parallel_to_knapsack(&inst).unwrap();
        let mapped = knapsack_front_to_interdiction(&k, &solve_biknapsack(&k).unwrap());
        assert_eq!(mapped, solve_exact(&inst).unwrap().front);
    }

    #[test]
    fn reduction_construction() {
        let kd = KnapsackDecisionInstance {
            items: vec![
                KnapsackItem { profit: 3, weight: 2 },
                KnapsackItem { profit: 1, weight: 1 },
            ],
            profit_target: 3,
            weight_limit: 2,
        };
        let (inst, k) = knapsack_to_bmfni(&kd).unwrap();
        let caps: Vec<(&str, u64, u64, u64)> =
            inst.arcs.iter().map(|a| (a.name.as_str(), a.u1, a.u2, a.cost)).collect();
        assert_eq!(
            caps,
            [("a1", 0, 2, 1), ("a2", 2, 1, 1), ("b1", 3, 0, 1), ("b2", 3, 0, 1)]
        );
        assert_eq!(inst.budget, 2);
        assert_eq!(k, ValuePair::new(3, 2));
        assert!(decision_check(&inst, k).unwrap());

        // all b arcs interdicted: only the a arcs carry flow
        let s = inst.strategy_from_arcs([2, 3]);
        let tree = inst.tree().unwrap();
        let v = crate::flow::sp_value_pair(&tree, tree.root(), &inst.arcs, &s);
        assert_eq!(v, ValuePair::new(2, 3));
    }

    #[test]
    fn single_item_reduction() {
        let kd = KnapsackDecisionInstance {
            items: vec![KnapsackItem { profit: 3, weight: 2 }],
            profit_target: 3,
            weight_limit: 2,
        };
        let (inst, k) = knapsack_to_bmfni(&kd).unwrap();
        assert_eq!(inst.arc_count(), 2);
        assert_eq!(k, ValuePair::new(0, 2));
    }

    #[test]
    fn decision_validation() {
        let bad = KnapsackDecisionInstance {
            items: vec![KnapsackItem { profit: 0, weight: 2 }],
            profit_target: 1,
            weight_limit: 1,
        };
        assert!(bad.validate().is_err());
        let bad = KnapsackDecisionInstance {
            items: vec![KnapsackItem { profit: 2, weight: 2 }],
            profit_target: 3,
            weight_limit: 1,
        };
        assert!(bad.validate().is_err());
    }
}
