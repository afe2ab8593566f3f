//! Pseudopolynomial dynamic program over the decomposition tree.
//!
//! For every tree node `H` and budget `x ∈ 0..=B` the table holds `L(H,x)`,
//! the nondominated flow-value pairs attainable in `H` with interdiction
//! cost at most `x`. Leaves are filled directly; a parallel node combines
//! its children with `⊕`, a series node with `⊙`, in both cases over every
//! split `k + (x−k)` of the budget, followed by dominance filtering.

use crate::error::Result;
use crate::model::{ArcAttrs, ArcId, Instance, Strategy, ValuePair};
use crate::pareto::{min_combine, minkowski_sum, LabeledPoint};
use crate::sp::{NodeKind, SpTree};
use crate::table::{compose, Sets};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpOptions {
    /// Carry witness strategies in labels. Without them only the value
    /// points are computed.
    pub witnesses: bool,
    /// Replace each front witness by the lexicographically smallest
    /// feasible strategy attaining the point.
    pub canonical_witnesses: bool,
    /// Keep every node's label sets in the returned table rather than only
    /// the root's.
    pub keep_table: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            witnesses: true,
            canonical_witnesses: true,
            keep_table: true,
        }
    }
}

impl DpOptions {
    pub fn points_only() -> Self {
        Self {
            witnesses: false,
            canonical_witnesses: false,
            keep_table: false,
        }
    }
}

/// `L(H,x)` for every node and budget. Sets of nodes dropped during the run
/// (see [`DpOptions::keep_table`]) are empty.
#[derive(Debug, Clone)]
pub struct LabelTable {
    budget: u64,
    sets: Vec<Sets<LabeledPoint>>,
}

impl LabelTable {
    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn get(&self, node: usize, x: u64) -> &[LabeledPoint] {
        &self.sets[node][x as usize]
    }

    /// Per-budget sets of one node.
    pub fn node(&self, node: usize) -> &[Vec<LabeledPoint>] {
        &self.sets[node]
    }

    pub fn node_count(&self) -> usize {
        self.sets.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpStats {
    /// Labels generated, leaves included, before dominance filtering.
    pub labels_created: u64,
    pub max_set_size: usize,
    /// Sets that exceeded `m_H·U + 1`; always zero unless something is wrong.
    pub size_bound_violations: usize,
}

#[derive(Debug, Clone)]
pub struct ExactSolution {
    /// `L(G,B)`: sorted by first value ascending.
    pub front: Vec<LabeledPoint>,
    pub table: LabelTable,
    /// The tree the table is indexed by (recognized if the instance came as
    /// an edge list).
    pub tree: SpTree,
    pub stats: DpStats,
}

/// Leaf sets for a single arc: its capacities while the budget is below its
/// cost, `(0,0)` with the arc interdicted from then on.
pub fn leaf_labels(arc: ArcId, attrs: &ArcAttrs, arc_count: usize, budget: u64) -> Vec<Vec<LabeledPoint>> {
    leaf(arc, attrs, arc_count, budget, ArcChoice::Free, None)
}

/// Parallel composition over all budget splits.
pub fn parallel_compose(left: &Sets<LabeledPoint>, right: &Sets<LabeledPoint>) -> Sets<LabeledPoint> {
    // validated instances keep every sum below 2^60
    compose(left, right, |a, b| minkowski_sum(a, b).expect("flow values exceed 2^60")).0
}

/// Series composition over all budget splits.
pub fn series_compose(left: &Sets<LabeledPoint>, right: &Sets<LabeledPoint>) -> Sets<LabeledPoint> {
    compose(left, right, min_combine).0
}

pub fn solve_exact(instance: &Instance) -> Result<ExactSolution> {
    solve_exact_with(instance, &DpOptions::default())
}

pub fn solve_exact_with(instance: &Instance, options: &DpOptions) -> Result<ExactSolution> {
    instance.ensure_valid()?;
    let tree = instance.tree()?.into_owned();
    let budget = instance.effective_budget();
    let arc_count = if options.witnesses {
        instance.arc_count()
    } else {
        0
    };

    let run = run_dp(&tree, &instance.arcs, arc_count, budget, None, options.keep_table);
    let mut front = run.sets[tree.root()][budget as usize].clone();

    // Series nodes may discard a dominated child label whose combination
    // still ties an optimal point, so the surviving witness can depend on the
    // tree shape. Parallel-only trees always keep the lexicographic minimum.
    if options.witnesses && options.canonical_witnesses && !tree.is_parallel_only() {
        for point in &mut front {
            point.witness = canonical_witness(&tree, &instance.arcs, budget, point);
        }
    }

    let u = instance.max_capacity_overall();
    let mut stats = DpStats {
        labels_created: run.created,
        ..DpStats::default()
    };
    for (id, node) in tree.nodes().iter().enumerate() {
        let bound = node.arc_count as u64 * u + 1;
        for set in &run.sets[id] {
            stats.max_set_size = stats.max_set_size.max(set.len());
            if set.len() as u64 > bound {
                stats.size_bound_violations += 1;
            }
        }
    }

    Ok(ExactSolution {
        front,
        table: LabelTable {
            budget,
            sets: run.sets,
        },
        tree,
        stats,
    })
}

/// Whether some feasible strategy reaches `VAL ≦ threshold`.
pub fn decision_check(instance: &Instance, threshold: ValuePair) -> Result<bool> {
    let solution = solve_exact_with(instance, &DpOptions::points_only())?;
    Ok(solution.front.iter().any(|p| p.value.weakly_le(&threshold)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArcChoice {
    Free,
    Kept,
    Interdicted,
}

struct DpRun {
    sets: Vec<Sets<LabeledPoint>>,
    created: u64,
}

fn leaf(
    arc: ArcId,
    attrs: &ArcAttrs,
    arc_count: usize,
    budget: u64,
    choice: ArcChoice,
    cap: Option<ValuePair>,
) -> Sets<LabeledPoint> {
    let mut capacities = attrs.capacities();
    if let Some(cap) = cap {
        capacities = capacities.componentwise_min(&cap);
    }
    let kept = LabeledPoint::new(capacities, Strategy::empty(arc_count));
    let cut = || {
        let mut w = Strategy::empty(arc_count);
        if arc_count > 0 {
            w.insert(arc, attrs.cost);
        }
        LabeledPoint::new(ValuePair::ZERO, w)
    };
    (0..=budget)
        .map(|x| match choice {
            ArcChoice::Kept => vec![kept.clone()],
            _ if x >= attrs.cost => vec![cut()],
            ArcChoice::Free => vec![kept.clone()],
            ArcChoice::Interdicted => vec![],
        })
        .collect()
}

/// Bottom-up pass over the tree. With `restrict`, arcs are forced kept or
/// interdicted and all values are clipped at a ceiling; clipping commutes
/// with both `+` and `min`, so `value ≦ p` questions stay exact under a
/// ceiling of `p + (1,1)`.
fn run_dp(
    tree: &SpTree,
    arcs: &[ArcAttrs],
    arc_count: usize,
    budget: u64,
    restrict: Option<(&[ArcChoice], ValuePair)>,
    keep_table: bool,
) -> DpRun {
    let cap = restrict.map(|(_, c)| c);
    let mut sets: Vec<Sets<LabeledPoint>> = Vec::with_capacity(tree.len());
    let mut created = 0u64;
    for node in tree.nodes() {
        let computed = match node.kind {
            NodeKind::Primitive(a) => {
                let choice = restrict.map_or(ArcChoice::Free, |(c, _)| c[a]);
                created += budget + 1;
                leaf(a, &arcs[a], arc_count, budget, choice, cap)
            }
            NodeKind::Parallel(l, r) => {
                let (out, n) = match cap {
                    None => compose(&sets[l], &sets[r], |a, b| {
                        minkowski_sum(a, b).expect("flow values exceed 2^60")
                    }),
                    Some(cap) => compose(&sets[l], &sets[r], |a, b| {
                        let mut v = minkowski_sum(a, b).expect("flow values exceed 2^60");
                        for p in &mut v {
                            p.value = p.value.componentwise_min(&cap);
                        }
                        v
                    }),
                };
                created += n;
                out
            }
            NodeKind::Series(l, r) => {
                let (out, n) = compose(&sets[l], &sets[r], min_combine);
                created += n;
                out
            }
        };
        if !keep_table {
            if let NodeKind::Series(l, r) | NodeKind::Parallel(l, r) = node.kind {
                sets[l] = Vec::new();
                sets[r] = Vec::new();
            }
        }
        sets.push(computed);
    }
    DpRun { sets, created }
}

/// Lexicographically smallest strategy with cost ≤ `budget` and value equal
/// to `point` (which must be nondominated at the root). Arcs are fixed one
/// at a time, preferring "kept"; a restricted DP confirms each choice only
/// when the current witness disagrees with it.
fn canonical_witness(tree: &SpTree, arcs: &[ArcAttrs], budget: u64, point: &LabeledPoint) -> Strategy {
    let target = point.value;
    let ceiling = ValuePair::new(target.v1 + 1, target.v2 + 1);
    let mut choices = vec![ArcChoice::Free; arcs.len()];
    let mut current = point.witness.clone();
    for a in 0..arcs.len() {
        choices[a] = ArcChoice::Kept;
        if !current.contains(a) {
            continue;
        }
        let run = run_dp(tree, arcs, arcs.len(), budget, Some((&choices, ceiling)), false);
        let found = run.sets[tree.root()][budget as usize]
            .iter()
            .find(|p| p.value.weakly_le(&target));
        match found {
            Some(p) => current = p.witness.clone(),
            None => choices[a] = ArcChoice::Interdicted,
        }
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::sp_value_pair;
    use crate::model::Topology;
    use crate::sp::{parse_sp_expression, parse_sp_expression_with, Fold};

    fn instance(expr: &str, caps: &[(u64, u64, u64)], budget: u64) -> Instance {
        let p = parse_sp_expression(expr).unwrap();
        let arcs = p
            .arc_names
            .iter()
            .zip(caps)
            .map(|(n, &(u1, u2, c))| ArcAttrs::new(n.clone(), u1, u2, c))
            .collect();
        Instance::new(arcs, Topology::Tree(p.tree), budget)
    }

    fn values(points: &[LabeledPoint]) -> Vec<(u64, u64)> {
        points.iter().map(|p| (p.value.v1, p.value.v2)).collect()
    }

    fn arc(u1: u64, u2: u64, c: u64) -> ArcAttrs {
        ArcAttrs::new("a", u1, u2, c)
    }

    #[test]
    fn leaf_examples() {
        let l = leaf_labels(0, &arc(3, 5, 2), 1, 3);
        assert_eq!(
            l.iter().map(|s| values(s)).collect::<Vec<_>>(),
            vec![vec![(3, 5)], vec![(3, 5)], vec![(0, 0)], vec![(0, 0)]]
        );
        assert!(l[2][0].witness.contains(0));
        assert!(l[0][0].witness.is_empty());

        let l = leaf_labels(0, &arc(3, 5, 5), 1, 3);
        assert!(l.iter().all(|s| values(s) == vec![(3, 5)]));

        let l = leaf_labels(0, &arc(0, 0, 1), 1, 1);
        assert!(l.iter().all(|s| values(s) == vec![(0, 0)]));
    }

    #[test]
    fn parallel_composition_examples() {
        let a = leaf_labels(0, &arc(2, 1, 1), 2, 1);
        let b = leaf_labels(1, &arc(1, 3, 1), 2, 1);
        let l = parallel_compose(&a, &b);
        assert_eq!(values(&l[0]), vec![(3, 4)]);
        assert_eq!(values(&l[1]), vec![(1, 3), (2, 1)]);

        let zero: Sets<LabeledPoint> =
            vec![vec![LabeledPoint::new(ValuePair::ZERO, Strategy::empty(2))]; 2];
        let l = parallel_compose(&a, &zero);
        assert_eq!(values(&l[0]), values(&a[0]));
        assert_eq!(values(&l[1]), values(&a[1]));

        let a = leaf_labels(0, &arc(1, 1, 1), 2, 2);
        let b = leaf_labels(1, &arc(1, 1, 1), 2, 2);
        assert_eq!(values(&parallel_compose(&a, &b)[2]), vec![(0, 0)]);
    }

    #[test]
    fn series_composition_examples() {
        let a = leaf_labels(0, &arc(2, 5, 1), 2, 1);
        let b = leaf_labels(1, &arc(4, 3, 1), 2, 1);
        let l = series_compose(&a, &b);
        assert_eq!(values(&l[0]), vec![(2, 3)]);
        assert_eq!(values(&l[1]), vec![(0, 0)]);

        let a = leaf_labels(0, &arc(3, 3, 1), 2, 0);
        let b = leaf_labels(1, &arc(3, 3, 1), 2, 0);
        assert_eq!(values(&series_compose(&a, &b)[0]), vec![(3, 3)]);

        let a = leaf_labels(0, &arc(7, 9, 1), 2, 2);
        let b = leaf_labels(1, &arc(0, 0, 1), 2, 2);
        assert!(series_compose(&a, &b).iter().all(|s| values(s) == vec![(0, 0)]));
    }

    #[test]
    fn three_arc_example() {
        let inst = instance(
            "P(arc(a),S(arc(b),arc(c)))",
            &[(2, 1, 1), (4, 4, 1), (1, 3, 1)],
            1,
        );
        let sol = solve_exact(&inst).unwrap();
        assert_eq!(values(&sol.front), vec![(1, 3), (2, 1)]);
        // (1,3) needs a cut; (2,1) is reached by cutting b (010) or c (001)
        assert_eq!(sol.front[0].witness.arcs().collect::<Vec<_>>(), vec![0]);
        assert_eq!(sol.front[1].witness.arcs().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn zero_budget_gives_uninterdicted_value() {
        let inst = instance(
            "S(P(arc(a),arc(b)),arc(c))",
            &[(2, 9, 1), (3, 1, 2), (4, 4, 1)],
            0,
        );
        let sol = solve_exact(&inst).unwrap();
        let tree = inst.tree().unwrap();
        let empty = sp_value_pair(&tree, tree.root(), &inst.arcs, &Strategy::empty(3));
        assert_eq!(values(&sol.front), vec![(empty.v1, empty.v2)]);
    }

    #[test]
    fn budget_is_clamped_to_total_cost() {
        let inst = instance("P(arc(a),arc(b))", &[(2, 1, 1), (1, 3, 2)], 100);
        let sol = solve_exact(&inst).unwrap();
        assert_eq!(sol.table.budget(), 3);
        assert_eq!(values(&sol.front), vec![(0, 0)]);
    }

    #[test]
    fn witnesses_reproduce_their_values() {
        let inst = instance(
            "S(P(arc(a),arc(b),S(arc(c),arc(d))),P(arc(e),arc(f)))",
            &[(5, 2, 1), (3, 3, 2), (4, 6, 1), (2, 7, 1), (6, 1, 3), (1, 5, 1)],
            4,
        );
        let sol = solve_exact(&inst).unwrap();
        let tree = &sol.tree;
        for (id, _) in tree.nodes().iter().enumerate() {
            for x in 0..=sol.table.budget() {
                for p in sol.table.get(id, x) {
                    assert_eq!(sp_value_pair(tree, id, &inst.arcs, &p.witness), p.value);
                    assert!(p.witness.cost() <= x);
                }
            }
        }
        assert_eq!(sol.stats.size_bound_violations, 0);
    }

    #[test]
    fn fold_order_does_not_change_the_front() {
        let expr = "S(P(arc(a),arc(b),S(arc(c),arc(d),arc(e))),P(arc(f),arc(g),arc(h)))";
        let caps = [(5, 2, 1), (3, 3, 2), (4, 6, 1), (2, 7, 1), (6, 1, 1), (1, 5, 1), (2, 2, 2), (3, 1, 1)];
        let left = instance(expr, &caps, 4);
        let mut right = left.clone();
        right.topology = Topology::Tree(parse_sp_expression_with(expr, Fold::Right).unwrap().tree);
        assert_ne!(left.topology, right.topology);
        let a = solve_exact(&left).unwrap().front;
        let b = solve_exact(&right).unwrap().front;
        assert_eq!(a, b);
    }

    #[test]
    fn points_only_mode_matches_values() {
        let inst = instance(
            "S(P(arc(a),arc(b)),P(arc(c),arc(d)))",
            &[(5, 2, 1), (3, 3, 1), (4, 6, 1), (2, 7, 1)],
            2,
        );
        let full = solve_exact(&inst).unwrap();
        let light = solve_exact_with(&inst, &DpOptions::points_only()).unwrap();
        assert_eq!(values(&full.front), values(&light.front));
        assert!(light.front.iter().all(|p| p.witness.is_empty()));
    }

    #[test]
    fn decision_examples() {
        let inst = instance("P(arc(a),arc(b))", &[(2, 1, 1), (1, 3, 1)], 1);
        assert!(decision_check(&inst, ValuePair::new(3, 4)).unwrap());
        assert!(decision_check(&inst, ValuePair::new(2, 1)).unwrap());
        assert!(!decision_check(&inst, ValuePair::ZERO).unwrap());
        assert!(!decision_check(&inst, ValuePair::new(1, 2)).unwrap());
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let inst = instance("P(arc(a),arc(b))", &[(2, 1, 0), (1, 3, 1)], 1);
        assert!(solve_exact(&inst).is_err());
    }
}
