//! Maximum-flow values of interdicted graphs.
//!
//! [`sp_value`] exploits the decomposition tree (a primitive carries its
//! capacity unless interdicted, series takes the minimum, parallel the sum).
//! [`MaxFlow`] is a plain shortest-augmenting-path solver on an explicit
//! edge list and shares nothing with the tree recursion, so the two serve as
//! cross-checks of each other.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{ArcAttrs, ArcId, Capacity, Strategy, ValuePair};
use crate::sp::{EdgeList, NodeId, NodeKind, SpTree};

/// `VAL(H(γ), uⁱ)` for the subgraph `H` rooted at `node`.
pub fn sp_value(
    tree: &SpTree,
    node: NodeId,
    arcs: &[ArcAttrs],
    strategy: &Strategy,
    which: Capacity,
) -> u64 {
    match tree.node(node).kind {
        NodeKind::Primitive(a) => {
            if strategy.contains(a) {
                0
            } else {
                arcs[a].capacity(which)
            }
        }
        NodeKind::Series(l, r) => sp_value(tree, l, arcs, strategy, which)
            .min(sp_value(tree, r, arcs, strategy, which)),
        NodeKind::Parallel(l, r) => {
            sp_value(tree, l, arcs, strategy, which) + sp_value(tree, r, arcs, strategy, which)
        }
    }
}

pub fn sp_value_pair(tree: &SpTree, node: NodeId, arcs: &[ArcAttrs], strategy: &Strategy) -> ValuePair {
    ValuePair::new(
        sp_value(tree, node, arcs, strategy, Capacity::First),
        sp_value(tree, node, arcs, strategy, Capacity::Second),
    )
}

#[derive(Debug, Clone)]
struct ResidualEdge {
    to: usize,
    cap: u64,
}

/// Reusable max-flow network over a fixed edge list. Capacities are supplied
/// per run, indexed by arc id; interdicted arcs are simply given capacity 0.
#[derive(Debug, Clone)]
pub struct MaxFlow {
    vertex_count: usize,
    source: usize,
    sink: usize,
    /// `(arc, tail, head)` per input edge
    arcs: Vec<(ArcId, usize, usize)>,
    // scratch
    edges: Vec<ResidualEdge>,
    adjacency: Vec<Vec<usize>>,
}

impl MaxFlow {
    pub fn new(list: &EdgeList) -> Result<Self> {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut arcs = Vec::with_capacity(list.edges.len());
        for e in &list.edges {
            let n = ids.len();
            let tail = *ids.entry(e.tail.as_str()).or_insert(n);
            let n = ids.len();
            let head = *ids.entry(e.head.as_str()).or_insert(n);
            arcs.push((e.arc, tail, head));
        }
        let source = *ids
            .get(list.source.as_str())
            .ok_or_else(|| Error::MissingTerminal(list.source.clone()))?;
        let sink = *ids
            .get(list.sink.as_str())
            .ok_or_else(|| Error::MissingTerminal(list.sink.clone()))?;
        let vertex_count = ids.len();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut edges = Vec::with_capacity(2 * arcs.len());
        for &(_, tail, head) in &arcs {
            adjacency[tail].push(edges.len());
            edges.push(ResidualEdge { to: head, cap: 0 });
            adjacency[head].push(edges.len());
            edges.push(ResidualEdge { to: tail, cap: 0 });
        }
        Ok(Self {
            vertex_count,
            source,
            sink,
            arcs,
            edges,
            adjacency,
        })
    }

    /// Maximum `s`-`t` flow value with `capacity(arc)` on every arc.
    pub fn run(&mut self, capacity: impl Fn(ArcId) -> u64) -> u64 {
        for (i, &(arc, _, _)) in self.arcs.iter().enumerate() {
            self.edges[2 * i].cap = capacity(arc);
            self.edges[2 * i + 1].cap = 0;
        }
        if self.source == self.sink {
            return 0;
        }
        let mut total = 0u64;
        let mut pred = vec![usize::MAX; self.vertex_count];
        let mut queue = VecDeque::new();
        loop {
            pred.fill(usize::MAX);
            queue.clear();
            queue.push_back(self.source);
            let mut reached = false;
            'bfs: while let Some(v) = queue.pop_front() {
                for &e in &self.adjacency[v] {
                    let edge = &self.edges[e];
                    if edge.cap > 0 && edge.to != self.source && pred[edge.to] == usize::MAX {
                        pred[edge.to] = e;
                        if edge.to == self.sink {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(edge.to);
                    }
                }
            }
            if !reached {
                return total;
            }
            let mut bottleneck = u64::MAX;
            let mut v = self.sink;
            while v != self.source {
                let e = pred[v];
                bottleneck = bottleneck.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = self.sink;
            while v != self.source {
                let e = pred[v];
                self.edges[e].cap -= bottleneck;
                self.edges[e ^ 1].cap += bottleneck;
                v = self.edges[e ^ 1].to;
            }
            total += bottleneck;
        }
    }

    /// `VAL(G(γ), uⁱ)` on the explicit graph.
    pub fn interdicted(&mut self, arcs: &[ArcAttrs], strategy: &Strategy, which: Capacity) -> u64 {
        self.run(|a| {
            if strategy.contains(a) {
                0
            } else {
                arcs[a].capacity(which)
            }
        })
    }

    pub fn interdicted_pair(&mut self, arcs: &[ArcAttrs], strategy: &Strategy) -> ValuePair {
        ValuePair::new(
            self.interdicted(arcs, strategy, Capacity::First),
            self.interdicted(arcs, strategy, Capacity::Second),
        )
    }
}

/// One-shot maximum flow on an edge list.
pub fn generic_max_flow(list: &EdgeList, capacity: impl Fn(ArcId) -> u64) -> Result<u64> {
    Ok(MaxFlow::new(list)?.run(capacity))
}
