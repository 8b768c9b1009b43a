//! Directed hypergraphs and their acyclic variant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{CycleWitness, Error, Result};
use crate::mixed::{topological_order, MixedGraph};
use crate::vertex::{format_set, VertexId, VertexSet};

/// A directed hyperedge `(tail, head)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperedge {
    tail: VertexSet,
    head: VertexSet,
}

impl Hyperedge {
    pub fn new(tail: VertexSet, head: VertexSet) -> Result<Self> {
        if tail.is_empty() && head.is_empty() {
            return Err(Error::EmptyEdge);
        }
        let overlap: VertexSet = tail.intersection(&head).cloned().collect();
        if !overlap.is_empty() {
            return Err(Error::TailHeadOverlap(overlap));
        }
        Ok(Hyperedge { tail, head })
    }

    /// Convenience constructor from label slices.
    pub fn from_labels(tail: &[&str], head: &[&str]) -> Result<Self> {
        Hyperedge::new(
            tail.iter().map(|s| VertexId::from(*s)).collect(),
            head.iter().map(|s| VertexId::from(*s)).collect(),
        )
    }

    pub fn tail(&self) -> &VertexSet {
        &self.tail
    }

    pub fn head(&self) -> &VertexSet {
        &self.head
    }

    pub fn is_fully_directed(&self) -> bool {
        !self.tail.is_empty() && !self.head.is_empty()
    }

    /// `tail ∪ head`
    pub fn vertices(&self) -> VertexSet {
        self.tail.union(&self.head).cloned().collect()
    }

    /// Sort key used for canonical output: head first, then tail.
    pub fn canonical_key(&self) -> (&VertexSet, &VertexSet) {
        (&self.head, &self.tail)
    }
}

impl fmt::Display for Hyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_set(&self.tail), format_set(&self.head))
    }
}

/// Partition of the vertex set into chain components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub components: Vec<VertexSet>,
    pub component_of: BTreeMap<VertexId, usize>,
}

impl ComponentPartition {
    pub(crate) fn from_graph(g: &MixedGraph) -> Self {
        let (id, comps) = g.component_ids();
        ComponentPartition {
            components: comps.iter().map(|c| g.set_of(c.iter().copied())).collect(),
            component_of: g.labels.iter().cloned().zip(id).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component equal to `set`.
    pub fn position(&self, set: &VertexSet) -> Option<usize> {
        let first = set.iter().next()?;
        let i = *self.component_of.get(first)?;
        (self.components[i] == *set).then_some(i)
    }
}

/// Quotient of a structure by its chain components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDag {
    pub components: Vec<VertexSet>,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl CanonicalDag {
    pub(crate) fn from_graph(g: &MixedGraph) -> Self {
        let (id, comps) = g.component_ids();
        let mut arcs = BTreeSet::new();
        for u in 0..g.len() {
            for &w in &g.children[u] {
                if id[u] != id[w] {
                    arcs.insert((id[u], id[w]));
                }
            }
        }
        CanonicalDag {
            components: comps.iter().map(|c| g.set_of(c.iter().copied())).collect(),
            arcs,
        }
    }

    /// Topological check of the arc set.
    pub fn is_acyclic(&self) -> bool {
        let mut succ = vec![BTreeSet::new(); self.components.len()];
        for &(i, j) in &self.arcs {
            succ[i].insert(j);
        }
        topological_order(&succ).is_some()
    }

    /// Arcs as pairs of components.
    pub fn arc_sets(&self) -> Vec<(VertexSet, VertexSet)> {
        self.arcs
            .iter()
            .map(|&(i, j)| (self.components[i].clone(), self.components[j].clone()))
            .collect()
    }
}

/// Per-vertex relations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relations {
    pub pa: VertexSet,
    pub nb: VertexSet,
    pub bd: VertexSet,
    pub cl: VertexSet,
    pub an: VertexSet,
    pub ant: VertexSet,
    pub de: VertexSet,
    pub nd: VertexSet,
}

pub(crate) fn relations_in(g: &MixedGraph, v: usize) -> Relations {
    let n = g.len();
    let pa = g.set_of(g.parents[v].iter().copied());
    let nb = g.set_of(g.neighbors[v].iter().copied());
    let bd: VertexSet = pa.union(&nb).cloned().collect();
    let mut cl = bd.clone();
    cl.insert(g.labels[v].clone());
    let from_v = g.leads_from(v);
    let to_v = g.anterior(&[v]);
    // u is a descendant of v when v leads to u but not back.
    let de = g.set_of((0..n).filter(|&u| u == v || (from_v[u] && !to_v[u])));
    let an = g.set_of((0..n).filter(|&u| u == v || (to_v[u] && !from_v[u])));
    let ant = g.set_of_mask(&to_v);
    let nd = g.set_of((0..n).filter(|&u| !(u == v || (from_v[u] && !to_v[u]))));
    Relations {
        pa,
        nb,
        bd,
        cl,
        an,
        ant,
        de,
        nd,
    }
}

/// A directed hypergraph, acyclic unless built with `require_acyclic = false`.
#[derive(Debug, Clone)]
pub struct Dah {
    vertices: VertexSet,
    edges: Vec<Hyperedge>,
    graph: MixedGraph,
}

impl PartialEq for Dah {
    /// Vertex sets equal and edge sets equal, regardless of edge order.
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edge_set() == other.edge_set()
    }
}

impl Eq for Dah {}

impl Dah {
    /// Validates and builds a hypergraph. Vertices must be listed once each.
    pub fn build(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: Vec<Hyperedge>,
        require_acyclic: bool,
    ) -> Result<Self> {
        let mut vset = VertexSet::new();
        for v in vertices {
            v.validate()?;
            if vset.contains(&v) {
                return Err(Error::DuplicateVertex(v));
            }
            vset.insert(v);
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            for v in e.tail.iter().chain(&e.head) {
                if !vset.contains(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
            }
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.to_string()));
            }
        }
        let dah = Dah::assemble(vset, edges);
        if require_acyclic {
            if let Some(w) = dah.find_cycle() {
                return Err(Error::CycleDetected(w));
            }
        }
        Ok(dah)
    }

    /// Acyclic hypergraph on exactly the listed vertices.
    pub fn new(vertices: impl IntoIterator<Item = VertexId>, edges: Vec<Hyperedge>) -> Result<Self> {
        Dah::build(vertices, edges, true)
    }

    /// Acyclic hypergraph on the vertices touched by `edges` plus `extra`.
    pub fn from_edges(edges: Vec<Hyperedge>, extra: &[&str]) -> Result<Self> {
        let mut vs: VertexSet = edges.iter().flat_map(|e| e.vertices()).collect();
        vs.extend(extra.iter().map(|s| VertexId::from(*s)));
        Dah::build(vs, edges, true)
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn assemble(vertices: VertexSet, edges: Vec<Hyperedge>) -> Self {
        let mut graph = MixedGraph::new(&vertices);
        for e in &edges {
            let head: Vec<usize> = e.head.iter().map(|v| graph.index(v).unwrap()).collect();
            for t in &e.tail {
                let ti = graph.index(t).unwrap();
                for &h in &head {
                    graph.add_arc(ti, h);
                }
            }
            for (i, &x) in head.iter().enumerate() {
                for &y in &head[i + 1..] {
                    graph.add_line(x, y);
                }
            }
        }
        graph.finish();
        Dah {
            vertices,
            edges,
            graph,
        }
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge_set(&self) -> BTreeSet<&Hyperedge> {
        self.edges.iter().collect()
    }

    /// Edges in canonical order: by sorted head, then sorted tail.
    pub fn sorted_edges(&self) -> Vec<&Hyperedge> {
        let mut edges: Vec<&Hyperedge> = self.edges.iter().collect();
        edges.sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
        edges
    }

    pub(crate) fn graph(&self) -> &MixedGraph {
        &self.graph
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// A witnessing partially directed cycle, if any.
    pub fn find_cycle(&self) -> Option<CycleWitness> {
        self.graph.find_cycle()
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

    fn check_subset(&self, s: &VertexSet) -> Result<()> {
        match s.iter().find(|v| !self.vertices.contains(*v)) {
            Some(v) => Err(Error::UnknownVertex(v.clone())),
            None => Ok(()),
        }
    }

    pub fn relations(&self, v: &VertexId) -> Result<Relations> {
        let i = self.index(v)?;
        Ok(relations_in(&self.graph, i))
    }

    pub fn parents(&self, v: &VertexId) -> Result<VertexSet> {
        let i = self.index(v)?;
        Ok(self.graph.set_of(self.graph.parents[i].iter().copied()))
    }

    pub fn neighbors(&self, v: &VertexId) -> Result<VertexSet> {
        let i = self.index(v)?;
        Ok(self.graph.set_of(self.graph.neighbors[i].iter().copied()))
    }

    pub fn children(&self, v: &VertexId) -> Result<VertexSet> {
        let i = self.index(v)?;
        Ok(self.graph.set_of(self.graph.children[i].iter().copied()))
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

    /// Smallest ancestral set containing `s`.
    pub fn anterior_set(&self, s: &VertexSet) -> Result<VertexSet> {
        self.check_subset(s)?;
        let seed: Vec<usize> = s.iter().map(|v| self.graph.index(v).unwrap()).collect();
        Ok(self.graph.set_of_mask(&self.graph.anterior(&seed)))
    }

    /// Vertex set `s` with the edges lying entirely inside it.
    pub fn induced(&self, s: &VertexSet) -> Result<Dah> {
        self.check_subset(s)?;
        let edges = self
            .edges
            .iter()
            .filter(|e| e.tail.is_subset(s) && e.head.is_subset(s))
            .cloned()
            .collect();
        Ok(Dah::assemble(s.clone(), edges))
    }

    /// Whether the two vertices share an edge of the shadow.
    pub fn adjacent(&self, u: &VertexId, w: &VertexId) -> Result<bool> {
        let (i, j) = (self.index(u)?, self.index(w)?);
        let g = &self.graph;
        Ok(g.children[i].binary_search(&j).is_ok()
            || g.parents[i].binary_search(&j).is_ok()
            || g.neighbors[i].binary_search(&j).is_ok())
    }
}
