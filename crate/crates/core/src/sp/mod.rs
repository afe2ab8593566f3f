//! Two-terminal series-parallel decomposition trees.
//!
//! A tree is stored as an arena whose nodes appear in post-order, so every
//! child index is smaller than its parent's and a forward scan visits
//! children first. The root is always the last node.

mod parse;
mod recognize;

use std::fmt;

use thiserror::Error;

use crate::model::ArcId;

pub use parse::{parse_sp_expression, parse_sp_expression_with, render_sp_expression, Fold, ParsedSp};
pub use recognize::recognize_sp;

pub type NodeId = usize;
pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpError {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: &'static str },
    #[error("duplicate arc id {0:?}")]
    DuplicateArc(String),
    #[error("unary composition at byte {pos}")]
    UnaryComposition { pos: usize },
    #[error("graph is not two-terminal series-parallel ({remaining} arcs left after reduction)")]
    NotSeriesParallel { remaining: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("terminal {0:?} does not occur in the graph")]
    MissingTerminal(String),
    #[error("source and sink coincide")]
    SameTerminals,
    #[error("graph has no arcs")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Primitive(ArcId),
    Series(NodeId, NodeId),
    Parallel(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpNode {
    pub kind: NodeKind,
    pub arc_count: usize,
    pub source: VertexId,
    pub sink: VertexId,
}

#[derive(Clone, PartialEq, Eq)]
pub struct SpTree {
    nodes: Vec<SpNode>,
}

/// One directed arc of an explicit multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub arc: ArcId,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
    pub source: String,
    pub sink: String,
}

/// Collects compositions in any order; [`SpTreeBuilder::finish`] renumbers
/// the part reachable from the root into post-order.
#[derive(Debug, Default)]
pub struct SpTreeBuilder {
    kinds: Vec<NodeKind>,
}

impl SpTreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, arc: ArcId) -> NodeId {
        self.push(NodeKind::Primitive(arc))
    }

    pub fn series(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.push(NodeKind::Series(left, right))
    }

    pub fn parallel(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.push(NodeKind::Parallel(left, right))
    }

    fn push(&mut self, kind: NodeKind) -> NodeId {
        self.kinds.push(kind);
        self.kinds.len() - 1
    }

    pub fn finish(self, root: NodeId) -> SpTree {
        let mut order = Vec::with_capacity(self.kinds.len());
        // iterative post-order
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            match self.kinds[id] {
                NodeKind::Primitive(_) => order.push(id),
                NodeKind::Series(l, r) | NodeKind::Parallel(l, r) => {
                    if expanded {
                        order.push(id);
                    } else {
                        stack.push((id, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
            }
        }
        let mut renumber = vec![usize::MAX; self.kinds.len()];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let mut nodes: Vec<SpNode> = order
            .iter()
            .map(|&old| {
                let kind = match self.kinds[old] {
                    NodeKind::Primitive(a) => NodeKind::Primitive(a),
                    NodeKind::Series(l, r) => NodeKind::Series(renumber[l], renumber[r]),
                    NodeKind::Parallel(l, r) => NodeKind::Parallel(renumber[l], renumber[r]),
                };
                SpNode {
                    kind,
                    arc_count: 0,
                    source: 0,
                    sink: 0,
                }
            })
            .collect();
        for i in 0..nodes.len() {
            nodes[i].arc_count = match nodes[i].kind {
                NodeKind::Primitive(_) => 1,
                NodeKind::Series(l, r) | NodeKind::Parallel(l, r) => {
                    nodes[l].arc_count + nodes[r].arc_count
                }
            };
        }
        // terminals are labelled in pre-order: root is (0, 1), every series
        // node mints the next vertex for its midpoint
        let root = nodes.len() - 1;
        nodes[root].source = 0;
        nodes[root].sink = 1;
        let mut next = 2;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let (s, t) = (nodes[id].source, nodes[id].sink);
            match nodes[id].kind {
                NodeKind::Primitive(_) => {}
                NodeKind::Series(l, r) => {
                    let mid = next;
                    next += 1;
                    (nodes[l].source, nodes[l].sink) = (s, mid);
                    (nodes[r].source, nodes[r].sink) = (mid, t);
                    stack.push(r);
                    stack.push(l);
                }
                NodeKind::Parallel(l, r) => {
                    (nodes[l].source, nodes[l].sink) = (s, t);
                    (nodes[r].source, nodes[r].sink) = (s, t);
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        SpTree { nodes }
    }
}

impl SpTree {
    pub fn primitive(arc: ArcId) -> SpTree {
        let mut b = SpTreeBuilder::new();
        let root = b.leaf(arc);
        b.finish(root)
    }

    pub fn root(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &SpNode {
        &self.nodes[id]
    }

    /// All nodes in post-order.
    pub fn nodes(&self) -> &[SpNode] {
        &self.nodes
    }

    /// Number of tree nodes, `2m − 1` for `m` arcs.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.nodes[self.root()].arc_count
    }

    /// Arc ids of the leaves, left to right.
    pub fn leaves(&self) -> Vec<ArcId> {
        self.leaves_of(self.root())
    }

    pub fn leaves_of(&self, node: NodeId) -> Vec<ArcId> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(id) = stack.pop() {
            match self.nodes[id].kind {
                NodeKind::Primitive(a) => out.push(a),
                NodeKind::Series(l, r) | NodeKind::Parallel(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }

    /// Whether every composition is parallel, i.e. all arcs run `s → t`.
    pub fn is_parallel_only(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| !matches!(n.kind, NodeKind::Series(..)))
    }

    /// The multigraph the tree denotes. Vertex 0 is `s`, 1 is `t`, and the
    /// midpoints minted by series nodes in pre-order are `v1, v2, …`.
    pub fn expand(&self) -> EdgeList {
        let name = |v: VertexId| match v {
            0 => "s".to_string(),
            1 => "t".to_string(),
            k => format!("v{}", k - 1),
        };
        let mut edges = Vec::with_capacity(self.arc_count());
        let mut stack = vec![self.root()];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            match node.kind {
                NodeKind::Primitive(arc) => edges.push(Edge {
                    arc,
                    tail: name(node.source),
                    head: name(node.sink),
                }),
                NodeKind::Series(l, r) | NodeKind::Parallel(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        EdgeList {
            edges,
            source: name(0),
            sink: name(1),
        }
    }

    /// Associativity- and parallel-commutativity-normalized form, used to
    /// compare trees that denote the same graph.
    pub fn canonical(&self) -> Canonical {
        self.canonical_of(self.root())
    }

    fn canonical_of(&self, id: NodeId) -> Canonical {
        match self.nodes[id].kind {
            NodeKind::Primitive(a) => Canonical::Arc(a),
            NodeKind::Series(..) => {
                let mut parts = Vec::new();
                self.flatten(id, true, &mut parts);
                Canonical::Series(parts)
            }
            NodeKind::Parallel(..) => {
                let mut parts = Vec::new();
                self.flatten(id, false, &mut parts);
                parts.sort_by_key(|c| c.min_arc());
                Canonical::Parallel(parts)
            }
        }
    }

    fn flatten(&self, id: NodeId, series: bool, out: &mut Vec<Canonical>) {
        match (self.nodes[id].kind, series) {
            (NodeKind::Series(l, r), true) | (NodeKind::Parallel(l, r), false) => {
                self.flatten(l, series, out);
                self.flatten(r, series, out);
            }
            _ => out.push(self.canonical_of(id)),
        }
    }
}

impl fmt::Debug for SpTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &SpTree, id: NodeId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t.nodes[id].kind {
                NodeKind::Primitive(a) => write!(f, "{a}"),
                NodeKind::Series(l, r) | NodeKind::Parallel(l, r) => {
                    let tag = if matches!(t.nodes[id].kind, NodeKind::Series(..)) {
                        "S"
                    } else {
                        "P"
                    };
                    write!(f, "{tag}(")?;
                    go(t, l, f)?;
                    f.write_str(",")?;
                    go(t, r, f)?;
                    f.write_str(")")
                }
            }
        }
        go(self, self.root(), f)
    }
}

/// N-ary normal form of a decomposition tree: nested same-kind compositions
/// are flattened and parallel children sorted by their smallest arc id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Canonical {
    Arc(ArcId),
    Series(Vec<Canonical>),
    Parallel(Vec<Canonical>),
}

impl Canonical {
    fn min_arc(&self) -> ArcId {
        match self {
            Canonical::Arc(a) => *a,
            Canonical::Series(v) | Canonical::Parallel(v) => {
                v.iter().map(Canonical::min_arc).min().unwrap_or(usize::MAX)
            }
        }
    }
}
