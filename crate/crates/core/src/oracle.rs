//! Brute-force ground truth: enumerate every feasible strategy, evaluate
//! both flows with the generic max-flow solver, keep the nondominated
//! values together with all strategies attaining them.
//!
//! Nothing here touches the decomposition tree or the DP code paths.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::MaxFlow;
use crate::model::{ArcId, Instance, Strategy, ValuePair};
use crate::pareto::{eps_covers, LabeledPoint};
use crate::rounding::Epsilon;

/// Default guard on the number of arcs the oracle accepts.
pub const DEFAULT_MAX_ARCS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OraclePoint {
    pub value: ValuePair,
    /// Every feasible strategy attaining `value`, lexicographically sorted.
    pub witnesses: Vec<Strategy>,
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Sorted by first value ascending.
    pub front: Vec<OraclePoint>,
    pub strategies_enumerated: u64,
    pub elapsed: Duration,
}

impl OracleReport {
    pub fn values(&self) -> Vec<ValuePair> {
        self.front.iter().map(|p| p.value).collect()
    }

    /// The front with each point's smallest witness.
    pub fn labeled(&self) -> Vec<LabeledPoint> {
        self.front
            .iter()
            .map(|p| LabeledPoint::new(p.value, p.witnesses[0].clone()))
            .collect()
    }
}

/// 2-D Pareto archive keyed by first value; second values strictly decrease
/// along the keys.
#[derive(Debug, Default)]
struct Archive {
    points: BTreeMap<u64, (u64, Vec<Strategy>)>,
}

impl Archive {
    fn insert(&mut self, value: ValuePair, witnesses: Vec<Strategy>) {
        if let Some((&v1, (v2, ws))) = self.points.range_mut(..=value.v1).next_back() {
            if *v2 <= value.v2 {
                if v1 == value.v1 && *v2 == value.v2 {
                    ws.extend(witnesses);
                }
                return;
            }
        }
        let doomed: Vec<u64> = self
            .points
            .range(value.v1..)
            .take_while(|(_, (v2, _))| *v2 >= value.v2)
            .map(|(&k, _)| k)
            .collect();
        for k in doomed {
            self.points.remove(&k);
        }
        self.points.insert(value.v1, (value.v2, witnesses));
    }

    fn merge(&mut self, other: Archive) {
        for (v1, (v2, ws)) in other.points {
            self.insert(ValuePair::new(v1, v2), ws);
        }
    }
}

struct Enumerator<'a> {
    instance: &'a Instance,
    order: &'a [ArcId],
    flow: MaxFlow,
    archive: Archive,
    count: u64,
}

impl Enumerator<'_> {
    fn record(&mut self, strategy: &Strategy) {
        self.count += 1;
        let value = self.flow.interdicted_pair(&self.instance.arcs, strategy);
        self.archive.insert(value, vec![strategy.clone()]);
    }

    /// Visits every feasible superset of `strategy` that adds arcs from
    /// `order[start..]` only. Arcs are sorted by cost, so the first one that
    /// no longer fits ends the loop.
    fn visit(&mut self, start: usize, strategy: &mut Strategy) {
        self.record(strategy);
        for j in start..self.order.len() {
            let a = self.order[j];
            let cost = self.instance.arcs[a].cost;
            if strategy.cost() + cost > self.instance.budget {
                break;
            }
            let mut next = strategy.clone();
            next.insert(a, cost);
            self.visit(j + 1, &mut next);
        }
    }
}

/// Exact nondominated front with complete witness lists. Refuses instances
/// with more than `max_arcs` arcs.
pub fn enumerate_front(instance: &Instance, max_arcs: usize) -> Result<OracleReport> {
    let started = Instant::now();
    instance.ensure_valid()?;
    let m = instance.arc_count();
    if m > max_arcs {
        return Err(Error::TooLarge {
            arcs: m,
            limit: max_arcs,
        });
    }
    let edges = instance.edge_list();
    let flow = MaxFlow::new(&edges)?;

    let mut order: Vec<ArcId> = (0..m).collect();
    order.sort_by_key(|&a| (instance.arcs[a].cost, a));

    let make = || Enumerator {
        instance,
        order: &order,
        flow: flow.clone(),
        archive: Archive::default(),
        count: 0,
    };

    // one partition per smallest-position arc in the subset, plus the empty
    // strategy
    let mut root = make();
    root.record(&Strategy::empty(m));
    let parts: Vec<(Archive, u64)> = (0..m)
        .into_par_iter()
        .filter_map(|j| {
            let a = order[j];
            let cost = instance.arcs[a].cost;
            if cost > instance.budget {
                return None;
            }
            let mut e = make();
            let mut s = Strategy::empty(m);
            s.insert(a, cost);
            e.visit(j + 1, &mut s);
            Some((e.archive, e.count))
        })
        .collect();

    let mut archive = root.archive;
    let mut count = root.count;
    for (part, n) in parts {
        archive.merge(part);
        count += n;
    }
    let front = archive
        .points
        .into_iter()
        .map(|(v1, (v2, mut witnesses))| {
            witnesses.sort();
            OraclePoint {
                value: ValuePair::new(v1, v2),
                witnesses,
            }
        })
        .collect();
    Ok(OracleReport {
        front,
        strategies_enumerated: count,
        elapsed: started.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Value sets must coincide.
    Exact,
    /// Every oracle point must be `(1+ε)`-covered by the candidate.
    Eps(Epsilon),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verdict {
    /// Oracle points absent from the candidate (exact mode).
    pub missing: Vec<ValuePair>,
    /// Candidate points absent from the oracle front (exact mode).
    pub unexpected: Vec<ValuePair>,
    /// Oracle points no candidate point covers (eps mode).
    pub uncovered: Vec<ValuePair>,
    /// Candidate points whose witness is infeasible or evaluates to a
    /// different value.
    pub bad_witnesses: Vec<(ValuePair, String)>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.missing.is_empty()
            && self.unexpected.is_empty()
            && self.uncovered.is_empty()
            && self.bad_witnesses.is_empty()
    }
}

/// Compares a candidate front against the oracle and re-evaluates every
/// candidate witness on the explicit graph.
pub fn verify_front(
    instance: &Instance,
    candidate: &[LabeledPoint],
    report: &OracleReport,
    mode: VerifyMode,
) -> Result<Verdict> {
    let mut verdict = Verdict::default();
    let truth = report.values();
    let claimed: Vec<ValuePair> = candidate.iter().map(|p| p.value).collect();
    match mode {
        VerifyMode::Exact => {
            verdict.missing = truth.iter().filter(|p| !claimed.contains(p)).copied().collect();
            verdict.unexpected = claimed.iter().filter(|p| !truth.contains(p)).copied().collect();
        }
        VerifyMode::Eps(eps) => {
            verdict.uncovered = truth
                .iter()
                .filter(|p| !eps_covers(&claimed, p, eps))
                .copied()
                .collect();
        }
    }

    let mut flow = MaxFlow::new(&instance.edge_list())?;
    for p in candidate {
        let w = &p.witness;
        if w.len() != instance.arc_count() {
            verdict
                .bad_witnesses
                .push((p.value, format!("witness ranges over {} arcs", w.len())));
            continue;
        }
        let cost: u64 = w.arcs().map(|a| instance.arcs[a].cost).sum();
        if cost > instance.budget {
            verdict
                .bad_witnesses
                .push((p.value, format!("witness cost {cost} exceeds budget")));
            continue;
        }
        let actual = flow.interdicted_pair(&instance.arcs, w);
        if actual != p.value {
            verdict
                .bad_witnesses
                .push((p.value, format!("witness evaluates to {actual}")));
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ArcAttrs, Topology};
    use crate::sp::parse_sp_expression;

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

    #[test]
    fn single_arc_fully_interdicted() {
        let r = enumerate_front(&instance("arc(a)", &[(4, 2, 2)], 3), 24).unwrap();
        assert_eq!(r.values(), vec![ValuePair::ZERO]);
        assert_eq!(r.strategies_enumerated, 2);
    }

    #[test]
    fn zero_budget_has_one_strategy() {
        let inst = instance("S(arc(a),P(arc(b),arc(c)))", &[(4, 9, 1), (2, 3, 1), (5, 1, 1)], 0);
        let r = enumerate_front(&inst, 24).unwrap();
        assert_eq!(r.strategies_enumerated, 1);
        assert_eq!(r.values(), vec![ValuePair::new(4, 4)]);
    }

    #[test]
    fn two_parallel_arcs() {
        let inst = instance("P(arc(a),arc(b))", &[(2, 1, 1), (1, 3, 1)], 1);
        let r = enumerate_front(&inst, 24).unwrap();
        assert_eq!(r.values(), vec![ValuePair::new(1, 3), ValuePair::new(2, 1)]);
        assert_eq!(r.strategies_enumerated, 3);
    }

    #[test]
    fn all_tied_witnesses_are_listed() {
        let inst = instance("P(arc(a),arc(b),arc(c))", &[(1, 1, 1), (1, 1, 1), (1, 1, 1)], 1);
        let r = enumerate_front(&inst, 24).unwrap();
        assert_eq!(r.front.len(), 1);
        let bits: Vec<String> = r.front[0].witnesses.iter().map(|w| w.to_bit_string()).collect();
        assert_eq!(bits, ["001", "010", "100"]);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let inst = instance("P(arc(a),arc(b),arc(c))", &[(1, 1, 1); 3], 1);
        assert!(matches!(
            enumerate_front(&inst, 2),
            Err(Error::TooLarge { arcs: 3, limit: 2 })
        ));
    }

    #[test]
    fn verification_modes() {
        let inst = instance("P(arc(a),arc(b))", &[(2, 1, 1), (1, 3, 1)], 1);
        let r = enumerate_front(&inst, 24).unwrap();
        let front = r.labeled();
        assert!(verify_front(&inst, &front, &r, VerifyMode::Exact).unwrap().passed());

        let truncated = &front[..1];
        let v = verify_front(&inst, truncated, &r, VerifyMode::Exact).unwrap();
        assert!(!v.passed());
        assert_eq!(v.missing, vec![ValuePair::new(2, 1)]);

        let eps = "0.5".parse().unwrap();
        assert!(verify_front(&inst, &front, &r, VerifyMode::Eps(eps)).unwrap().passed());

        let mut forged = front.clone();
        forged[0].value = ValuePair::new(0, 3);
        let v = verify_front(&inst, &forged, &r, VerifyMode::Eps(eps)).unwrap();
        assert_eq!(v.bad_witnesses.len(), 1);
    }

    #[test]
    fn archive_keeps_only_nondominated() {
        let mut a = Archive::default();
        let s = Strategy::empty(0);
        for (x, y) in [(5, 5), (3, 7), (6, 4), (4, 4), (3, 7), (1, 9), (4, 3)] {
            a.insert(ValuePair::new(x, y), vec![s.clone()]);
        }
        let got: Vec<(u64, u64, usize)> = a.points.iter().map(|(&k, (v, w))| (k, *v, w.len())).collect();
        assert_eq!(got, vec![(1, 9, 1), (3, 7, 2), (4, 3, 1)]);
    }
}
