//! Undirected graphs: cliques and separation.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::vertex::{VertexId, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    vertices: VertexSet,
    edges: BTreeSet<(VertexId, VertexId)>,
}

impl UndirectedGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut vset = VertexSet::new();
        for v in vertices {
            v.validate()?;
            if vset.contains(&v) {
                return Err(Error::DuplicateVertex(v));
            }
            vset.insert(v);
        }
        let mut es = BTreeSet::new();
        for (u, w) in edges {
            for x in [&u, &w] {
                if !vset.contains(x) {
                    return Err(Error::UnknownVertex(x.clone()));
                }
            }
            if u == w {
                return Err(Error::SelfLoop(u));
            }
            es.insert(if u < w { (u, w) } else { (w, u) });
        }
        Ok(UndirectedGraph::assemble(vset, es))
    }

    pub(crate) fn assemble(vertices: VertexSet, edges: BTreeSet<(VertexId, VertexId)>) -> Self {
        UndirectedGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// Edges `(u, w)` with `u < w`.
    pub fn edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.edges
    }

    pub fn has_edge(&self, u: &VertexId, w: &VertexId) -> bool {
        if u < w {
            self.edges.contains(&(u.clone(), w.clone()))
        } else {
            self.edges.contains(&(w.clone(), u.clone()))
        }
    }

    fn adjacency(&self) -> (Vec<VertexId>, Vec<Vec<bool>>) {
        let labels: Vec<VertexId> = self.vertices.iter().cloned().collect();
        let n = labels.len();
        let mut adj = vec![vec![false; n]; n];
        for (u, w) in &self.edges {
            let i = labels.binary_search(u).unwrap();
            let j = labels.binary_search(w).unwrap();
            adj[i][j] = true;
            adj[j][i] = true;
        }
        (labels, adj)
    }

    /// Inclusion-maximal cliques, each sorted, list sorted.
    pub fn maximal_cliques(&self) -> Vec<VertexSet> {
        let (labels, adj) = self.adjacency();
        let n = labels.len();
        if n == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let all: BTreeSet<usize> = (0..n).collect();
        bron_kerbosch(&adj, &mut Vec::new(), all, BTreeSet::new(), &mut out);
        let mut cliques: Vec<VertexSet> = out
            .into_iter()
            .map(|c| c.into_iter().map(|i| labels[i].clone()).collect())
            .collect();
        cliques.sort();
        cliques
    }

    /// Whether every path from `a` to `b` meets `c`.
    pub fn separates(&self, a: &VertexSet, b: &VertexSet, c: &VertexSet) -> Result<bool> {
        for v in a.iter().chain(b).chain(c) {
            if !self.vertices.contains(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::OverlappingSets);
        }
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        let mut seen: BTreeSet<&VertexId> = a.iter().collect();
        let mut queue: VecDeque<&VertexId> = a.iter().collect();
        let mut nbrs: std::collections::BTreeMap<&VertexId, Vec<&VertexId>> = Default::default();
        for (u, w) in &self.edges {
            nbrs.entry(u).or_default().push(w);
            nbrs.entry(w).or_default().push(u);
        }
        while let Some(u) = queue.pop_front() {
            if b.contains(u) {
                return Ok(false);
            }
            for &w in nbrs.get(u).map(Vec::as_slice).unwrap_or(&[]) {
                if !c.contains(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Ok(true)
    }

    /// Subgraph induced on `s`.
    pub fn induced(&self, s: &VertexSet) -> UndirectedGraph {
        UndirectedGraph {
            vertices: self.vertices.intersection(s).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(u, w)| s.contains(u) && s.contains(w))
                .cloned()
                .collect(),
        }
    }
}

/// Bron–Kerbosch with pivoting.
fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        let mut c = r.clone();
        c.sort_unstable();
        out.push(c);
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        r.push(v);
        let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}
