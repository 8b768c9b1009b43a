//! Shadow of a hypergraph and hypermoralization of a chain graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain_graph::ChainGraph;
use crate::dah::{Dah, Hyperedge};
use crate::error::{Error, Result};
use crate::vertex::{VertexId, VertexSet};

/// Each head becomes a clique of lines, each tail vertex gets an arc to each head vertex.
pub fn shadow(h: &Dah) -> Result<ChainGraph> {
    if let Some(w) = h.find_cycle() {
        return Err(Error::CycleDetected(w));
    }
    let mut arcs = BTreeSet::new();
    let mut lines = BTreeSet::new();
    for e in h.edges() {
        for t in e.tail() {
            for x in e.head() {
                arcs.insert((t.clone(), x.clone()));
            }
        }
        let head: Vec<&VertexId> = e.head().iter().collect();
        for (i, x) in head.iter().enumerate() {
            for y in &head[i + 1..] {
                lines.insert(((*x).clone(), (*y).clone()));
            }
        }
    }
    Ok(ChainGraph::assemble(h.vertices().clone(), arcs, lines))
}

/// The canonical LWF hypergraph of `g`.
pub fn hypermoralize(g: &ChainGraph) -> Dah {
    let lines = g.undirected_part();
    let mut phase1: Vec<(VertexSet, VertexSet)> = Vec::new();
    for v in g.vertices() {
        let ch = g.children(v).expect("vertex of g");
        if ch.is_empty() {
            continue;
        }
        for k in lines.induced(&ch).maximal_cliques() {
            phase1.push((VertexSet::from([v.clone()]), k));
        }
    }
    for k in lines.maximal_cliques() {
        if k.len() >= 2 && !phase1.iter().any(|(_, head)| k.is_subset(head)) {
            phase1.push((VertexSet::new(), k));
        }
    }

    let partition = g.chain_components();
    let mut by_component: BTreeMap<usize, Vec<&(VertexSet, VertexSet)>> = BTreeMap::new();
    for e in &phase1 {
        let first = e.1.iter().next().expect("non-empty head");
        by_component.entry(partition.component_of[first]).or_default().push(e);
    }
    let mut edges = BTreeSet::new();
    for members in by_component.values() {
        // Close the heads under pairwise intersection.
        let mut family: BTreeSet<VertexSet> = members.iter().map(|e| e.1.clone()).collect();
        loop {
            let current: Vec<VertexSet> = family.iter().cloned().collect();
            let mut grew = false;
            for (i, x) in current.iter().enumerate() {
                for y in &current[i + 1..] {
                    let z: VertexSet = x.intersection(y).cloned().collect();
                    if !z.is_empty() && family.insert(z) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        for b in family {
            let tail: VertexSet = members
                .iter()
                .filter(|e| b.is_subset(&e.1))
                .flat_map(|e| e.0.iter().cloned())
                .collect();
            edges.insert(Hyperedge::new(tail, b).expect("tail and head are disjoint"));
        }
    }
    let mut edges: Vec<Hyperedge> = edges.into_iter().collect();
    edges.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    Dah::assemble(g.vertices().clone(), edges)
}

/// Whether `h` is the canonical LWF hypergraph of its own shadow.
pub fn is_lwf_dah(h: &Dah) -> Result<bool> {
    Ok(hypermoralize(&shadow(h)?) == *h)
}
