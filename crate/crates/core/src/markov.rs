//! Separation queries and Markov statements.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::chain_graph::{minimal_complexes, ChainGraph};
use crate::dah::Dah;
use crate::error::{Error, Result};
use crate::mixed::{separated, MixedGraph};
use crate::projection::shadow;
use crate::vertex::{format_set, VertexSet};

/// `a ⟂ b | c`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct CiStatement {
    pub a: VertexSet,
    pub b: VertexSet,
    pub c: VertexSet,
}

impl CiStatement {
    pub fn new(a: VertexSet, b: VertexSet, c: VertexSet) -> Result<Self> {
        if !a.is_disjoint(&b) || !a.is_disjoint(&c) || !b.is_disjoint(&c) {
            return Err(Error::OverlappingSets);
        }
        Ok(CiStatement { a, b, c })
    }

    /// Orders the two sides so that `a` comes first lexicographically.
    pub fn canonical(self) -> Self {
        match cmp_sets(&self.a, &self.b) {
            Ordering::Greater => CiStatement {
                a: self.b,
                b: self.a,
                c: self.c,
            },
            _ => self,
        }
    }

    pub fn swapped(&self) -> Self {
        CiStatement {
            a: self.b.clone(),
            b: self.a.clone(),
            c: self.c.clone(),
        }
    }
}

fn cmp_sets(x: &VertexSet, y: &VertexSet) -> Ordering {
    x.iter().cmp(y.iter())
}

impl fmt::Display for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} _||_ {} | {}",
            format_set(&self.a),
            format_set(&self.b),
            format_set(&self.c)
        )
    }
}

fn query_indices(g: &MixedGraph, vertices: &VertexSet, sets: [&VertexSet; 3]) -> Result<[Vec<usize>; 3]> {
    for s in sets {
        if let Some(v) = s.iter().find(|v| !vertices.contains(*v)) {
            return Err(Error::UnknownVertex(v.clone()));
        }
    }
    let [a, b, c] = sets;
    if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
        return Err(Error::OverlappingSets);
    }
    Ok(sets.map(|s| s.iter().map(|v| g.index(v).unwrap()).collect()))
}

fn anterior_separates(g: &MixedGraph, [a, b, c]: &[Vec<usize>; 3]) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let seed: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let keep = g.anterior(&seed);
    let adj = g.moral_adjacency(&keep);
    separated(&adj, &keep, a, b, c)
}

/// Whether `c` separates `a` and `b` in the moral graph of the shadow of the anterior sub-hypergraph.
pub fn hg_separates(h: &Dah, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    let idx = query_indices(h.graph(), h.vertices(), [a, b, c])?;
    Ok(anterior_separates(h.graph(), &idx))
}

/// Chain-graph global Markov test.
pub fn cg_global_separates(g: &ChainGraph, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
    let idx = query_indices(g.graph(), g.vertices(), [a, b, c])?;
    Ok(anterior_separates(g.graph(), &idx))
}

/// `v ⟂ u | nd(v) \ {v, u}` for every non-adjacent `u ∈ nd(v)`, canonical and deduplicated.
pub fn pairwise_statements(h: &Dah) -> Result<Vec<CiStatement>> {
    let mut out = BTreeSet::new();
    for v in h.vertices() {
        let nd = h.relations(v)?.nd;
        for u in &nd {
            if u == v || h.adjacent(v, u)? {
                continue;
            }
            let mut c = nd.clone();
            c.remove(u);
            c.remove(v);
            out.insert(
                CiStatement {
                    a: VertexSet::from([v.clone()]),
                    b: VertexSet::from([u.clone()]),
                    c,
                }
                .canonical(),
            );
        }
    }
    Ok(out.into_iter().collect())
}

/// `v ⟂ nd(v) \ cl(v) | bd(v)` for every vertex with a non-empty middle set, in vertex order.
pub fn local_statements(h: &Dah) -> Result<Vec<CiStatement>> {
    let mut out = Vec::new();
    for v in h.vertices() {
        let r = h.relations(v)?;
        let rest: VertexSet = r.nd.difference(&r.cl).cloned().collect();
        if !rest.is_empty() {
            out.push(CiStatement {
                a: VertexSet::from([v.clone()]),
                b: rest,
                c: r.bd,
            });
        }
    }
    Ok(out)
}

/// Same shadow skeleton and same minimal complexes.
pub fn markov_equivalent(h1: &Dah, h2: &Dah) -> Result<bool> {
    if h1.vertices() != h2.vertices() {
        return Err(Error::VertexSetMismatch);
    }
    let (g1, g2) = (shadow(h1)?, shadow(h2)?);
    Ok(g1.skeleton() == g2.skeleton() && minimal_complexes(&g1)? == minimal_complexes(&g2)?)
}
