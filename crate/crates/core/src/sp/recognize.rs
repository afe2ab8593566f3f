//! Recognition of two-terminal series-parallel multigraphs by repeated
//! parallel reduction (merge arcs with identical endpoints) and series
//! reduction (contract an inner vertex with one arc in and one arc out).
//! The graph is series-parallel iff a single `s → t` arc survives.

use std::collections::HashMap;

use super::{EdgeList, NodeId, SpError, SpTree, SpTreeBuilder};

#[derive(Debug, Clone, Copy)]
struct Link {
    tail: usize,
    head: usize,
    node: NodeId,
}

pub fn recognize_sp(list: &EdgeList) -> Result<SpTree, SpError> {
    if list.source == list.sink {
        return Err(SpError::SameTerminals);
    }
    if list.edges.is_empty() {
        return Err(SpError::Empty);
    }

    let mut names: HashMap<String, usize> = HashMap::new();
    let mut id_of = |name: &str| -> usize {
        let n = names.len();
        *names.entry(name.to_string()).or_insert(n)
    };

    let mut builder = SpTreeBuilder::new();
    let mut links: Vec<Option<Link>> = list
        .edges
        .iter()
        .map(|e| {
            Some(Link {
                tail: id_of(&e.tail),
                head: id_of(&e.head),
                node: builder.leaf(e.arc),
            })
        })
        .collect();

    let s = *names
        .get(&list.source)
        .ok_or_else(|| SpError::MissingTerminal(list.source.clone()))?;
    let t = *names
        .get(&list.sink)
        .ok_or_else(|| SpError::MissingTerminal(list.sink.clone()))?;
    let n = names.len();

    if !weakly_connected(n, links.iter().flatten()) {
        return Err(SpError::Disconnected);
    }

    loop {
        let mut changed = false;

        let mut bundles: HashMap<(usize, usize), usize> = HashMap::new();
        for i in 0..links.len() {
            let Some(link) = links[i] else { continue };
            match bundles.get(&(link.tail, link.head)) {
                Some(&first) => {
                    let kept = links[first].as_mut().unwrap();
                    kept.node = builder.parallel(kept.node, link.node);
                    links[i] = None;
                    changed = true;
                }
                None => {
                    bundles.insert((link.tail, link.head), i);
                }
            }
        }

        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for (i, link) in links.iter().enumerate() {
            if let Some(link) = link {
                outgoing[link.tail].push(i);
                incoming[link.head].push(i);
            }
        }
        let contractible = (0..n).find(|&v| {
            v != s
                && v != t
                && incoming[v].len() == 1
                && outgoing[v].len() == 1
                && links[incoming[v][0]].unwrap().tail != links[outgoing[v][0]].unwrap().head
        });
        if let Some(v) = contractible {
            let (i, o) = (incoming[v][0], outgoing[v][0]);
            let (a, b) = (links[i].unwrap(), links[o].unwrap());
            links[i] = Some(Link {
                tail: a.tail,
                head: b.head,
                node: builder.series(a.node, b.node),
            });
            links[o] = None;
            changed = true;
        }

        if !changed {
            break;
        }
    }

    let live: Vec<Link> = links.into_iter().flatten().collect();
    match live.as_slice() {
        [only] if only.tail == s && only.head == t => Ok(builder.finish(only.node)),
        _ => Err(SpError::NotSeriesParallel {
            remaining: live.len(),
        }),
    }
}

fn weakly_connected<'a>(n: usize, links: impl Iterator<Item = &'a Link>) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for l in links {
        let (a, b) = (find(&mut parent, l.tail), find(&mut parent, l.head));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components == 1
}
