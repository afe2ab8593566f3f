//! Instance data model, interdiction strategies and the two componentwise
//! orders on flow-value pairs.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::sp::{self, EdgeList, SpTree};

/// Index of an arc inside an [`Instance`]; arcs are numbered `0..m`.
pub type ArcId = usize;

/// Upper bound on `m·U` and on the total interdiction cost. Every sum the
/// solvers form stays below this, so `u64` arithmetic cannot overflow.
pub const VALUE_CAP: u64 = 1 << 60;

/// Which of the two capacity functions a flow is computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    First,
    Second,
}

impl Capacity {
    pub const BOTH: [Capacity; 2] = [Capacity::First, Capacity::Second];
}

/// Per-arc data: external id, the two capacities and the interdiction cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcAttrs {
    pub name: String,
    pub u1: u64,
    pub u2: u64,
    pub cost: u64,
}

impl ArcAttrs {
    pub fn new(name: impl Into<String>, u1: u64, u2: u64, cost: u64) -> Self {
        Self {
            name: name.into(),
            u1,
            u2,
            cost,
        }
    }

    pub fn capacity(&self, which: Capacity) -> u64 {
        match which {
            Capacity::First => self.u1,
            Capacity::Second => self.u2,
        }
    }

    pub fn capacities(&self) -> ValuePair {
        ValuePair::new(self.u1, self.u2)
    }
}

/// The graph of an instance, either as a decomposition tree or as a raw
/// edge list that still has to be recognized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    Tree(SpTree),
    Edges(EdgeList),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub arcs: Vec<ArcAttrs>,
    pub topology: Topology,
    pub budget: u64,
}

/// One reason an instance is malformed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub arc: Option<String>,
    pub reason: String,
}

impl Violation {
    fn global(reason: impl Into<String>) -> Self {
        Self {
            arc: None,
            reason: reason.into(),
        }
    }

    fn arc(arc: &str, reason: impl Into<String>) -> Self {
        Self {
            arc: Some(arc.to_string()),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arc {
            Some(a) => write!(f, "arc {a}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

impl Instance {
    pub fn new(arcs: Vec<ArcAttrs>, topology: Topology, budget: u64) -> Self {
        Self {
            arcs,
            topology,
            budget,
        }
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// `Uⁱ`, the largest capacity with respect to one capacity function.
    pub fn max_capacity(&self, which: Capacity) -> u64 {
        self.arcs.iter().map(|a| a.capacity(which)).max().unwrap_or(0)
    }

    /// `U = max(U¹, U²)`.
    pub fn max_capacity_overall(&self) -> u64 {
        self.max_capacity(Capacity::First)
            .max(self.max_capacity(Capacity::Second))
    }

    pub fn unit_costs(&self) -> bool {
        self.arcs.iter().all(|a| a.cost == 1)
    }

    pub fn total_cost(&self) -> u64 {
        self.arcs.iter().map(|a| a.cost).sum()
    }

    /// Budget beyond which nothing changes: every arc can be interdicted
    /// once the budget reaches the total cost.
    pub fn effective_budget(&self) -> u64 {
        self.budget.min(self.total_cost())
    }

    pub fn arc_names(&self) -> Vec<&str> {
        self.arcs.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn arc_by_name(&self, name: &str) -> Option<ArcId> {
        self.arcs.iter().position(|a| a.name == name)
    }

    /// Reports every invariant violation; an empty list means well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let m = self.arcs.len();
        if m == 0 {
            out.push(Violation::global("at least one arc required"));
        }

        let mut names: Vec<&str> = self.arcs.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        for w in names.windows(2) {
            if w[0] == w[1] {
                out.push(Violation::arc(w[0], "duplicate arc id"));
            }
        }

        for a in &self.arcs {
            if a.cost == 0 {
                out.push(Violation::arc(&a.name, "cost must be positive"));
            }
        }

        let mut seen = vec![0usize; m];
        let mut unknown = 0usize;
        match &self.topology {
            Topology::Tree(tree) => {
                for arc in tree.leaves() {
                    match seen.get_mut(arc) {
                        Some(c) => *c += 1,
                        None => unknown += 1,
                    }
                }
            }
            Topology::Edges(list) => {
                if list.source == list.sink {
                    out.push(Violation::global("source and sink must differ"));
                }
                for e in &list.edges {
                    match seen.get_mut(e.arc) {
                        Some(c) => *c += 1,
                        None => unknown += 1,
                    }
                }
            }
        }
        if unknown > 0 {
            out.push(Violation::global(format!(
                "graph references {unknown} arc(s) without attributes"
            )));
        }
        for (a, &count) in self.arcs.iter().zip(&seen) {
            match count {
                0 => out.push(Violation::arc(&a.name, "arc missing from graph")),
                1 => {}
                _ => out.push(Violation::arc(&a.name, "arc appears more than once in graph")),
            }
        }

        let u = self.max_capacity_overall() as u128;
        if (m as u128) * u > VALUE_CAP as u128 {
            out.push(Violation::global("m·U exceeds 2^60"));
        }
        let total: u128 = self.arcs.iter().map(|a| a.cost as u128).sum();
        if total > VALUE_CAP as u128 {
            out.push(Violation::global("total interdiction cost exceeds 2^60"));
        }
        if self.budget > VALUE_CAP {
            out.push(Violation::global("budget exceeds 2^60"));
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// The decomposition tree, recognizing it from the edge list if needed.
    pub fn tree(&self) -> Result<Cow<'_, SpTree>> {
        match &self.topology {
            Topology::Tree(t) => Ok(Cow::Borrowed(t)),
            Topology::Edges(list) => Ok(Cow::Owned(sp::recognize_sp(list)?)),
        }
    }

    /// The edge list, expanding the decomposition tree if needed.
    pub fn edge_list(&self) -> Cow<'_, EdgeList> {
        match &self.topology {
            Topology::Tree(t) => Cow::Owned(t.expand()),
            Topology::Edges(list) => Cow::Borrowed(list),
        }
    }

    pub fn strategy_from_arcs(&self, arcs: impl IntoIterator<Item = ArcId>) -> Strategy {
        let mut s = Strategy::empty(self.arcs.len());
        for a in arcs {
            s.insert(a, self.arcs[a].cost);
        }
        s
    }

    pub fn is_feasible(&self, s: &Strategy) -> bool {
        s.cost() <= self.budget
    }
}

/// Pair of maximum-flow values `(VAL(G(γ),u¹), VAL(G(γ),u²))`.
///
/// The derived `Ord` is lexicographic and only used for sorting; dominance
/// is expressed through [`ValuePair::dominance`] and [`ValuePair::weakly_le`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ValuePair {
    pub v1: u64,
    pub v2: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    StrictlyDominates,
    Equal,
    Incomparable,
    Dominated,
}

impl ValuePair {
    pub const ZERO: ValuePair = ValuePair { v1: 0, v2: 0 };

    pub const fn new(v1: u64, v2: u64) -> Self {
        Self { v1, v2 }
    }

    pub fn get(&self, which: Capacity) -> u64 {
        match which {
            Capacity::First => self.v1,
            Capacity::Second => self.v2,
        }
    }

    /// `self ≦ other`: componentwise, equality allowed.
    pub fn weakly_le(&self, other: &ValuePair) -> bool {
        self.v1 <= other.v1 && self.v2 <= other.v2
    }

    /// `self ≤ other`: componentwise and not equal.
    pub fn strictly_le(&self, other: &ValuePair) -> bool {
        self.weakly_le(other) && self != other
    }

    /// Where `self` stands relative to `other` under minimization.
    pub fn dominance(&self, other: &ValuePair) -> Dominance {
        if self == other {
            Dominance::Equal
        } else if self.weakly_le(other) {
            Dominance::StrictlyDominates
        } else if other.weakly_le(self) {
            Dominance::Dominated
        } else {
            Dominance::Incomparable
        }
    }

    pub fn checked_add(&self, other: &ValuePair) -> Option<ValuePair> {
        Some(ValuePair::new(
            self.v1.checked_add(other.v1)?,
            self.v2.checked_add(other.v2)?,
        ))
    }

    pub fn componentwise_min(&self, other: &ValuePair) -> ValuePair {
        ValuePair::new(self.v1.min(other.v1), self.v2.min(other.v2))
    }
}

impl fmt::Display for ValuePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.v1, self.v2)
    }
}

/// `dominates(p, q)` as a free function.
pub fn dominates(p: &ValuePair, q: &ValuePair) -> Dominance {
    p.dominance(q)
}

/// Binary interdiction vector over the arcs of an instance, with its total
/// cost cached.
///
/// Ordering is lexicographic over arc indices with arc 0 most significant
/// and "not interdicted" before "interdicted"; it is the tie-break used by
/// every solver when several strategies attain the same point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Strategy {
    words: SmallVec<[u64; 2]>,
    len: usize,
    cost: u64,
}

impl Strategy {
    pub fn empty(arc_count: usize) -> Self {
        Self {
            words: SmallVec::from_elem(0, arc_count.div_ceil(64)),
            len: arc_count,
            cost: 0,
        }
    }

    /// The number of arcs the vector ranges over (not the number interdicted).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn contains(&self, arc: ArcId) -> bool {
        arc < self.len && self.words[arc / 64] >> (arc % 64) & 1 == 1
    }

    /// Marks `arc` as interdicted, adding `cost` if it was not already.
    pub fn insert(&mut self, arc: ArcId, cost: u64) {
        assert!(arc < self.len, "arc {arc} out of range {}", self.len);
        if !self.contains(arc) {
            self.words[arc / 64] |= 1 << (arc % 64);
            self.cost += cost;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        (0..self.len).filter(move |&a| self.contains(a))
    }

    pub fn is_disjoint(&self, other: &Strategy) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    /// `γ¹ + γ²` for strategies on disjoint arc sets.
    ///
    /// # Panics
    ///
    /// If the supports overlap or the vectors range over different arc counts.
    pub fn disjoint_union(&self, other: &Strategy) -> Strategy {
        assert_eq!(self.len, other.len, "strategy length mismatch");
        assert!(self.is_disjoint(other), "strategy supports overlap");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        Strategy {
            words,
            len: self.len,
            cost: self.cost + other.cost,
        }
    }

    /// Bit vector as `0`/`1` characters, arc 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|a| if self.contains(a) { '1' } else { '0' })
            .collect()
    }
}

impl Ord for Strategy {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if a >> bit & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        self.len
            .cmp(&other.len)
            .then(self.cost.cmp(&other.cost))
    }
}

impl PartialOrd for Strategy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Strategy({} cost={})", self.to_bit_string(), self.cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sp::parse_sp_expression;

    fn single_arc(u1: u64, u2: u64, cost: u64, budget: u64) -> Instance {
        let parsed = parse_sp_expression("arc(a)").unwrap();
        Instance::new(
            vec![ArcAttrs::new("a", u1, u2, cost)],
            Topology::Tree(parsed.tree),
            budget,
        )
    }

    #[test]
    fn minimal_instance_is_valid() {
        assert!(single_arc(3, 5, 1, 0).validate().is_empty());
    }

    #[test]
    fn zero_cost_is_rejected() {
        let v = single_arc(3, 5, 0, 0).validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].reason, "cost must be positive");
        assert_eq!(v[0].arc.as_deref(), Some("a"));
    }

    #[test]
    fn empty_arc_set_is_rejected() {
        let inst = Instance::new(
            vec![],
            Topology::Edges(EdgeList {
                edges: vec![],
                source: "s".into(),
                sink: "t".into(),
            }),
            0,
        );
        let v = inst.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].reason, "at least one arc required");
    }

    #[test]
    fn capacity_cap_is_enforced() {
        let v = single_arc(VALUE_CAP + 1, 0, 1, 0).validate();
        assert!(v.iter().any(|v| v.reason.contains("2^60")));
    }

    #[test]
    fn missing_and_duplicate_arcs_are_reported() {
        let parsed = parse_sp_expression("P(arc(a),arc(b))").unwrap();
        let inst = Instance::new(
            vec![
                ArcAttrs::new("a", 1, 1, 1),
                ArcAttrs::new("b", 1, 1, 1),
                ArcAttrs::new("a", 1, 1, 1),
            ],
            Topology::Tree(parsed.tree),
            1,
        );
        let v = inst.validate();
        assert!(v.iter().any(|v| v.reason == "duplicate arc id"));
        assert!(v.iter().any(|v| v.reason == "arc missing from graph"));
    }

    #[test]
    fn dominance_examples() {
        let p = ValuePair::new;
        assert_eq!(dominates(&p(1, 3), &p(2, 3)), Dominance::StrictlyDominates);
        assert_eq!(dominates(&p(2, 2), &p(2, 2)), Dominance::Equal);
        assert_eq!(dominates(&p(1, 5), &p(3, 2)), Dominance::Incomparable);
        assert_eq!(dominates(&p(2, 3), &p(1, 3)), Dominance::Dominated);
    }

    #[test]
    fn dominance_is_a_strict_partial_order_on_a_grid() {
        let grid: Vec<ValuePair> = (0..5)
            .flat_map(|a| (0..5).map(move |b| ValuePair::new(a, b)))
            .collect();
        let lt = |a: &ValuePair, b: &ValuePair| a.dominance(b) == Dominance::StrictlyDominates;
        for a in &grid {
            assert!(!lt(a, a));
            for b in &grid {
                if lt(a, b) {
                    assert!(!lt(b, a));
                    assert_eq!(b.dominance(a), Dominance::Dominated);
                }
                for c in &grid {
                    if lt(a, b) && lt(b, c) {
                        assert!(lt(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn strategy_order_is_lexicographic_by_arc_index() {
        let mk = |bits: &str| {
            let mut s = Strategy::empty(bits.len());
            for (i, c) in bits.chars().enumerate() {
                if c == '1' {
                    s.insert(i, 1);
                }
            }
            s
        };
        let mut v = [mk("110"), mk("001"), mk("010"), mk("000"), mk("100")];
        v.sort();
        let got: Vec<String> = v.iter().map(|s| s.to_bit_string()).collect();
        assert_eq!(got, ["000", "001", "010", "100", "110"]);

        let wide_a = {
            let mut s = Strategy::empty(130);
            s.insert(3, 1);
            s
        };
        let wide_b = {
            let mut s = Strategy::empty(130);
            s.insert(129, 1);
            s
        };
        assert!(wide_b < wide_a);
    }

    #[test]
    fn strategy_union_tracks_cost() {
        let mut a = Strategy::empty(4);
        a.insert(0, 2);
        let mut b = Strategy::empty(4);
        b.insert(3, 5);
        let u = a.disjoint_union(&b);
        assert_eq!(u.cost(), 7);
        assert_eq!(u.arcs().collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    #[should_panic(expected = "overlap")]
    fn overlapping_union_panics() {
        let mut a = Strategy::empty(2);
        a.insert(1, 1);
        a.disjoint_union(&a.clone());
    }
}
