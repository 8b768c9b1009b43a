//! LWF chain graphs.

use std::collections::BTreeSet;

use crate::dah::{relations_in, CanonicalDag, ComponentPartition, Relations};
use crate::error::{Error, Result};
use crate::mixed::MixedGraph;
use crate::undirected::UndirectedGraph;
use crate::vertex::{VertexId, VertexSet};

/// A graph with arcs and lines and no partially directed cycle.
#[derive(Debug, Clone)]
pub struct ChainGraph {
    vertices: VertexSet,
    directed: BTreeSet<(VertexId, VertexId)>,
    undirected: BTreeSet<(VertexId, VertexId)>,
    graph: MixedGraph,
}

impl PartialEq for ChainGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.directed == other.directed
            && self.undirected == other.undirected
    }
}

impl Eq for ChainGraph {}

fn ordered(u: VertexId, w: VertexId) -> (VertexId, VertexId) {
    if u <= w {
        (u, w)
    } else {
        (w, u)
    }
}

impl ChainGraph {
    /// Lines are unordered; `(u, w)` and `(w, u)` collapse.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        directed: impl IntoIterator<Item = (VertexId, VertexId)>,
        undirected: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut vset = VertexSet::new();
        for v in vertices {
            v.validate()?;
            if vset.contains(&v) {
                return Err(Error::DuplicateVertex(v));
            }
            vset.insert(v);
        }
        let known = |v: &VertexId| {
            if vset.contains(v) {
                Ok(())
            } else {
                Err(Error::UnknownVertex(v.clone()))
            }
        };
        let mut arcs = BTreeSet::new();
        for (u, w) in directed {
            known(&u)?;
            known(&w)?;
            if u == w {
                return Err(Error::SelfLoop(u));
            }
            arcs.insert((u, w));
        }
        let mut lines = BTreeSet::new();
        for (u, w) in undirected {
            known(&u)?;
            known(&w)?;
            if u == w {
                return Err(Error::SelfLoop(u));
            }
            if arcs.contains(&(u.clone(), w.clone())) || arcs.contains(&(w.clone(), u.clone())) {
                let (x, y) = ordered(u, w);
                return Err(Error::ConflictingEdge(x, y));
            }
            lines.insert(ordered(u, w));
        }
        let g = ChainGraph::assemble(vset, arcs, lines);
        if let Some(w) = g.graph.find_cycle() {
            return Err(Error::CycleDetected(w));
        }
        Ok(g)
    }

    /// Convenience constructor from label pairs; vertices are those mentioned plus `extra`.
    pub fn from_labels(arcs: &[(&str, &str)], lines: &[(&str, &str)], extra: &[&str]) -> Result<Self> {
        let mut vs = VertexSet::new();
        for (u, w) in arcs.iter().chain(lines) {
            vs.insert((*u).into());
            vs.insert((*w).into());
        }
        vs.extend(extra.iter().map(|s| VertexId::from(*s)));
        ChainGraph::new(
            vs,
            arcs.iter().map(|(u, w)| ((*u).into(), (*w).into())),
            lines.iter().map(|(u, w)| ((*u).into(), (*w).into())),
        )
    }

    pub(crate) fn assemble(
        vertices: VertexSet,
        directed: BTreeSet<(VertexId, VertexId)>,
        undirected: BTreeSet<(VertexId, VertexId)>,
    ) -> Self {
        let mut graph = MixedGraph::new(&vertices);
        for (u, w) in &directed {
            graph.add_arc(graph.index(u).unwrap(), graph.index(w).unwrap());
        }
        for (u, w) in &undirected {
            graph.add_line(graph.index(u).unwrap(), graph.index(w).unwrap());
        }
        graph.finish();
        ChainGraph {
            vertices,
            directed,
            undirected,
            graph,
        }
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// Arcs `u -> w`, sorted.
    pub fn directed(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.directed
    }

    /// Lines `u - w` with `u < w`, sorted.
    pub fn undirected(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.undirected
    }

    pub(crate) fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn chain_components(&self) -> ComponentPartition {
        ComponentPartition::from_graph(&self.graph)
    }

    pub fn canonical_dag(&self) -> CanonicalDag {
        CanonicalDag::from_graph(&self.graph)
    }

    fn index(&self, v: &VertexId) -> Result<usize> {
        self.graph
            .index(v)
            .ok_or_else(|| Error::UnknownVertex(v.clone()))
    }

    pub(crate) fn check_subset(&self, s: &VertexSet) -> Result<()> {
        match s.iter().find(|v| !self.vertices.contains(*v)) {
            Some(v) => Err(Error::UnknownVertex(v.clone())),
            None => Ok(()),
        }
    }

    pub fn relations(&self, v: &VertexId) -> Result<Relations> {
        Ok(relations_in(&self.graph, self.index(v)?))
    }

    pub fn parents(&self, v: &VertexId) -> Result<VertexSet> {
        let i = self.index(v)?;
        Ok(self.graph.set_of(self.graph.parents[i].iter().copied()))
    }

    pub fn children(&self, v: &VertexId) -> Result<VertexSet> {
        let i = self.index(v)?;
        Ok(self.graph.set_of(self.graph.children[i].iter().copied()))
    }

    pub fn neighbors(&self, v: &VertexId) -> Result<VertexSet> {
        let i = self.index(v)?;
        Ok(self.graph.set_of(self.graph.neighbors[i].iter().copied()))
    }

    /// `pa(S) = ∪ pa(v) \ S`
    pub fn parents_of_set(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_subset(s)?;
        let mut out = VertexSet::new();
        for v in s {
            out.extend(self.parents(v)?);
        }
        Ok(out.difference(s).cloned().collect())
    }

    /// `bd(S) = (pa(S) ∪ nb(S)) \ S`
    pub fn boundary(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_subset(s)?;
        let mut out = VertexSet::new();
        for v in s {
            out.extend(self.parents(v)?);
            out.extend(self.neighbors(v)?);
        }
        Ok(out.difference(s).cloned().collect())
    }

    pub fn anterior_set(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_subset(s)?;
        let seed: Vec<usize> = s.iter().map(|v| self.graph.index(v).unwrap()).collect();
        Ok(self.graph.set_of_mask(&self.graph.anterior(&seed)))
    }

    /// Subgraph induced on `s`.
    pub fn induced(&self, s: &VertexSet) -> Result<ChainGraph> {
        self.check_subset(s)?;
        let inside = |(u, w): &&(VertexId, VertexId)| s.contains(u) && s.contains(w);
        Ok(ChainGraph::assemble(
            s.clone(),
            self.directed.iter().filter(inside).cloned().collect(),
            self.undirected.iter().filter(inside).cloned().collect(),
        ))
    }

    /// Undirected version of every edge.
    pub fn skeleton(&self) -> UndirectedGraph {
        UndirectedGraph::assemble(
            self.vertices.clone(),
            self.directed
                .iter()
                .map(|(u, w)| ordered(u.clone(), w.clone()))
                .chain(self.undirected.iter().cloned())
                .collect(),
        )
    }

    /// Only the lines.
    pub fn undirected_part(&self) -> UndirectedGraph {
        UndirectedGraph::assemble(self.vertices.clone(), self.undirected.clone())
    }

    /// Skeleton plus a completed boundary for every chain component.
    pub fn moral_graph(&self) -> UndirectedGraph {
        let keep = vec![true; self.graph.len()];
        let adj = self.graph.moral_adjacency(&keep);
        let mut edges = BTreeSet::new();
        for (i, row) in adj.iter().enumerate() {
            for (j, &on) in row.iter().enumerate().skip(i + 1) {
                if on {
                    edges.insert((self.graph.labels[i].clone(), self.graph.labels[j].clone()));
                }
            }
        }
        UndirectedGraph::assemble(self.vertices.clone(), edges)
    }

    pub fn adjacent(&self, u: &VertexId, w: &VertexId) -> bool {
        self.directed.contains(&(u.clone(), w.clone()))
            || self.directed.contains(&(w.clone(), u.clone()))
            || self.undirected.contains(&ordered(u.clone(), w.clone()))
    }
}

/// A complex `(alpha, b, beta)` with `alpha < beta`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Complex {
    pub alpha: VertexId,
    pub b: VertexSet,
    pub beta: VertexId,
}

/// Largest chain component searched exhaustively for complexes.
pub const COMPLEX_SEARCH_LIMIT: usize = 15;

/// All minimal complexes, sorted.
pub fn minimal_complexes(g: &ChainGraph) -> Result<Vec<Complex>> {
    let mut out = BTreeSet::new();
    for comp in g.chain_components().components {
        if comp.len() > COMPLEX_SEARCH_LIMIT {
            return Err(Error::ComplexSearchTooLarge {
                size: comp.len(),
                component: comp,
                limit: COMPLEX_SEARCH_LIMIT,
            });
        }
        let members: Vec<VertexId> = comp.iter().cloned().collect();
        let k = members.len();
        let parents: Vec<VertexSet> = members.iter().map(|v| g.parents(v).unwrap()).collect();
        let nbr_mask: Vec<u32> = members
            .iter()
            .map(|v| {
                let nb = g.neighbors(v).unwrap();
                (0..k).filter(|&j| nb.contains(&members[j])).fold(0, |m, j| m | 1 << j)
            })
            .collect();
        let connected = |mask: u32| {
            let start = mask.trailing_zeros() as usize;
            let mut seen = 1u32 << start;
            let mut frontier = seen;
            while frontier != 0 {
                let mut next = 0;
                for j in 0..k {
                    if frontier >> j & 1 == 1 {
                        next |= nbr_mask[j] & mask;
                    }
                }
                frontier = next & !seen;
                seen |= next;
            }
            seen == mask
        };
        // Complex-forming subsets found so far, per (alpha, beta).
        let mut found: Vec<(VertexId, VertexId, u32)> = Vec::new();
        let mut masks: Vec<u32> = (1..1u32 << k).collect();
        masks.sort_by_key(|m| m.count_ones());
        for mask in masks {
            if !connected(mask) {
                continue;
            }
            let pa_b: VertexSet = (0..k)
                .filter(|&j| mask >> j & 1 == 1)
                .flat_map(|j| parents[j].iter().cloned())
                .collect();
            let pa_b: Vec<VertexId> = pa_b.into_iter().collect();
            for (i, alpha) in pa_b.iter().enumerate() {
                for beta in &pa_b[i + 1..] {
                    if g.adjacent(alpha, beta) {
                        continue;
                    }
                    let shadowed = found
                        .iter()
                        .any(|(a, b, m)| a == alpha && b == beta && m & mask == *m);
                    if shadowed {
                        continue;
                    }
                    found.push((alpha.clone(), beta.clone(), mask));
                    out.insert(Complex {
                        alpha: alpha.clone(),
                        b: (0..k)
                            .filter(|&j| mask >> j & 1 == 1)
                            .map(|j| members[j].clone())
                            .collect(),
                        beta: beta.clone(),
                    });
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::vertex_set;

    fn fig2() -> ChainGraph {
        ChainGraph::from_labels(
            &[("a", "d"), ("a", "e"), ("b", "e"), ("b", "f"), ("c", "f")],
            &[("d", "e"), ("e", "f")],
            &[],
        )
        .unwrap()
    }

    fn fig6() -> ChainGraph {
        ChainGraph::from_labels(
            &[("a", "d"), ("a", "e"), ("b", "e"), ("c", "e"), ("c", "f")],
            &[("d", "e"), ("e", "f")],
            &[],
        )
        .unwrap()
    }

    fn cx(a: &str, b: &[&str], beta: &str) -> Complex {
        Complex {
            alpha: a.into(),
            b: vertex_set(b),
            beta: beta.into(),
        }
    }

    #[test]
    fn build_errors() {
        assert!(matches!(
            ChainGraph::from_labels(&[("u", "v"), ("w", "u")], &[("v", "w")], &[]),
            Err(Error::CycleDetected(_))
        ));
        assert_eq!(
            ChainGraph::from_labels(&[("u", "u")], &[], &[]),
            Err(Error::SelfLoop("u".into()))
        );
        assert_eq!(
            ChainGraph::from_labels(&[("v", "u")], &[("u", "v")], &[]),
            Err(Error::ConflictingEdge("u".into(), "v".into()))
        );
        assert!(ChainGraph::from_labels(&[], &[], &["x"]).is_ok());
    }

    #[test]
    fn lines_are_unordered() {
        let g = ChainGraph::from_labels(&[], &[("b", "a"), ("a", "b")], &[]).unwrap();
        assert_eq!(g.undirected().len(), 1);
    }

    #[test]
    fn components() {
        assert_eq!(
            fig2().chain_components().components,
            vec![vertex_set(["a"]), vertex_set(["b"]), vertex_set(["c"]), vertex_set(["d", "e", "f"])]
        );
        assert_eq!(
            fig6().chain_components().components,
            vec![vertex_set(["a"]), vertex_set(["b"]), vertex_set(["c"]), vertex_set(["d", "e", "f"])]
        );
        let g = ChainGraph::from_labels(&[], &[], &["x", "y", "z"]).unwrap();
        assert_eq!(g.chain_components().len(), 3);
    }

    #[test]
    fn figure_six_moral_cliques() {
        let m = fig6().moral_graph();
        assert_eq!(
            m.maximal_cliques(),
            vec![vertex_set(["a", "b", "c", "e"]), vertex_set(["a", "d", "e"]), vertex_set(["c", "e", "f"])]
        );
        assert!(m
            .separates(&vertex_set(["d"]), &vertex_set(["f"]), &vertex_set(["a", "c", "e"]))
            .unwrap());
    }

    #[test]
    fn collider_moralization() {
        let g = ChainGraph::from_labels(&[("a", "c"), ("b", "c")], &[], &[]).unwrap();
        let m = g.moral_graph();
        assert!(m.has_edge(&"a".into(), &"b".into()));
    }

    #[test]
    fn undirected_graph_is_its_own_moral_graph() {
        let g = ChainGraph::from_labels(&[], &[("a", "b"), ("b", "c")], &["d"]).unwrap();
        assert_eq!(g.moral_graph(), g.skeleton());
    }

    #[test]
    fn complexes_of_figure_two() {
        assert_eq!(
            minimal_complexes(&fig2()).unwrap(),
            vec![cx("a", &["e"], "b"), cx("a", &["e", "f"], "c"), cx("b", &["f"], "c")]
        );
    }

    #[test]
    fn complexes_small_cases() {
        let collider = ChainGraph::from_labels(&[("a", "c"), ("b", "c")], &[], &[]).unwrap();
        assert_eq!(minimal_complexes(&collider).unwrap(), vec![cx("a", &["c"], "b")]);
        let complete = ChainGraph::from_labels(&[("a", "b"), ("a", "c"), ("b", "c")], &[], &[]).unwrap();
        assert!(minimal_complexes(&complete).unwrap().is_empty());
        let shielded = ChainGraph::from_labels(&[("a", "c"), ("b", "c"), ("a", "b")], &[], &[]).unwrap();
        assert!(minimal_complexes(&shielded).unwrap().is_empty());
    }

    #[test]
    fn complex_search_limit() {
        let names: Vec<String> = (0..16).map(|i| format!("v{i:02}")).collect();
        let lines: Vec<(&str, &str)> = names.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
        let g = ChainGraph::from_labels(&[], &lines, &[]).unwrap();
        assert!(matches!(
            minimal_complexes(&g),
            Err(Error::ComplexSearchTooLarge { size: 16, limit: 15, .. })
        ));
    }

    #[test]
    fn boundary_and_parents_of_sets() {
        let g = fig2();
        let def = vertex_set(["d", "e", "f"]);
        assert_eq!(g.parents_of_set(&def).unwrap(), vertex_set(["a", "b", "c"]));
        assert_eq!(g.boundary(&vertex_set(["e"])).unwrap(), vertex_set(["a", "b", "d", "f"]));
    }
}
