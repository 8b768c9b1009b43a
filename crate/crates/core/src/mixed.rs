//! Index-based mixed graph shared by DAHs (through their shadow) and chain graphs.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{CycleWitness, Link};
use crate::vertex::{VertexId, VertexSet};

#[derive(Debug, Clone, Default)]
pub(crate) struct MixedGraph {
    pub labels: Vec<VertexId>,
    pub children: Vec<Vec<usize>>,
    pub parents: Vec<Vec<usize>>,
    pub neighbors: Vec<Vec<usize>>,
}

impl MixedGraph {
    pub fn new(vertices: &VertexSet) -> Self {
        let n = vertices.len();
        MixedGraph {
            labels: vertices.iter().cloned().collect(),
            children: vec![Vec::new(); n],
            parents: vec![Vec::new(); n],
            neighbors: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, v: &VertexId) -> Option<usize> {
        self.labels.binary_search(v).ok()
    }

    pub fn add_arc(&mut self, from: usize, to: usize) {
        self.children[from].push(to);
        self.parents[to].push(from);
    }

    pub fn add_line(&mut self, u: usize, w: usize) {
        self.neighbors[u].push(w);
        self.neighbors[w].push(u);
    }

    pub fn finish(&mut self) {
        for list in self
            .children
            .iter_mut()
            .chain(self.parents.iter_mut())
            .chain(self.neighbors.iter_mut())
        {
            list.sort_unstable();
            list.dedup();
        }
    }

    pub fn set_of(&self, idx: impl IntoIterator<Item = usize>) -> VertexSet {
        idx.into_iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn set_of_mask(&self, mask: &[bool]) -> VertexSet {
        self.set_of((0..self.len()).filter(|&i| mask[i]))
    }

    /// Connected components of the undirected part. Component ids follow the smallest member.
    pub fn component_ids(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let n = self.len();
        let mut id = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if id[start] != usize::MAX {
                continue;
            }
            let c = comps.len();
            let mut members = vec![start];
            id[start] = c;
            let mut k = 0;
            while k < members.len() {
                let u = members[k];
                k += 1;
                for &w in &self.neighbors[u] {
                    if id[w] == usize::MAX {
                        id[w] = c;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        (id, comps)
    }

    /// One partially directed cycle, if any.
    pub fn find_cycle(&self) -> Option<CycleWitness> {
        let (id, comps) = self.component_ids();
        // An arc inside a component closes a cycle through the component's lines.
        for u in 0..self.len() {
            for &w in &self.children[u] {
                if id[u] == id[w] {
                    let mut vertices = vec![u];
                    let mut links = vec![Link::Directed];
                    let back = self.line_path(w, u);
                    vertices.extend(&back[..back.len() - 1]);
                    links.extend(std::iter::repeat(Link::Undirected).take(back.len() - 1));
                    return Some(self.witness(vertices, links));
                }
            }
        }
        let k = comps.len();
        let mut quotient: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        for u in 0..self.len() {
            for &w in &self.children[u] {
                quotient[id[u]].insert(id[w]);
            }
        }
        let comp_cycle = directed_cycle(&quotient)?;
        // Expand each quotient arc into a concrete arc plus a line path inside the next component.
        let m = comp_cycle.len();
        let mut arcs = Vec::with_capacity(m);
        for i in 0..m {
            let (from, to) = (comp_cycle[i], comp_cycle[(i + 1) % m]);
            let arc = comps[from]
                .iter()
                .flat_map(|&u| self.children[u].iter().map(move |&w| (u, w)))
                .find(|&(_, w)| id[w] == to)
                .expect("quotient arc has a witness");
            arcs.push(arc);
        }
        let mut vertices = Vec::new();
        let mut links = Vec::new();
        for i in 0..m {
            let (u, w) = arcs[i];
            let (next_u, _) = arcs[(i + 1) % m];
            if vertices.last() != Some(&u) {
                vertices.push(u);
            }
            links.push(Link::Directed);
            let path = self.line_path(w, next_u);
            for (j, &x) in path.iter().enumerate() {
                vertices.push(x);
                if j + 1 < path.len() {
                    links.push(Link::Undirected);
                }
            }
        }
        // The walk ends where it started.
        if vertices.len() > 1 && vertices.last() == vertices.first() {
            vertices.pop();
        }
        Some(self.witness(vertices, links))
    }

    fn witness(&self, vertices: Vec<usize>, links: Vec<Link>) -> CycleWitness {
        CycleWitness {
            vertices: vertices.into_iter().map(|i| self.labels[i].clone()).collect(),
            links,
        }
    }

    /// Shortest undirected path from `from` to `to` (inclusive of both ends).
    fn line_path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &w in &self.neighbors[u] {
                if prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Vertices reachable from `start` along lines and forward arcs, `start` included.
    pub fn leads_from(&self, start: usize) -> Vec<bool> {
        self.reach(&[start], |u| {
            self.children[u].iter().chain(&self.neighbors[u]).copied().collect()
        })
    }

    /// Vertices from which some member of `seed` is reachable along lines and forward arcs.
    pub fn anterior(&self, seed: &[usize]) -> Vec<bool> {
        self.reach(seed, |u| {
            self.parents[u].iter().chain(&self.neighbors[u]).copied().collect()
        })
    }

    fn reach(&self, seed: &[usize], next: impl Fn(usize) -> Vec<usize>) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = Vec::new();
        for &s in seed {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for w in next(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Adjacency of the moral graph of the subgraph induced on `keep`.
    pub fn moral_adjacency(&self, keep: &[bool]) -> Vec<Vec<bool>> {
        let n = self.len();
        let mut adj = vec![vec![false; n]; n];
        for u in (0..n).filter(|&u| keep[u]) {
            for &w in self.children[u].iter().chain(&self.neighbors[u]) {
                if keep[w] {
                    adj[u][w] = true;
                    adj[w][u] = true;
                }
            }
        }
        // Components of the induced subgraph, then complete each boundary.
        let mut comp = vec![usize::MAX; n];
        for start in (0..n).filter(|&u| keep[u]) {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut members = vec![start];
            comp[start] = start;
            let mut k = 0;
            while k < members.len() {
                let u = members[k];
                k += 1;
                for &w in &self.neighbors[u] {
                    if keep[w] && comp[w] == usize::MAX {
                        comp[w] = start;
                        members.push(w);
                    }
                }
            }
            let mut boundary: Vec<usize> = members
                .iter()
                .flat_map(|&u| self.parents[u].iter().copied())
                .filter(|&p| keep[p] && comp[p] != start)
                .collect();
            boundary.sort_unstable();
            boundary.dedup();
            for (i, &x) in boundary.iter().enumerate() {
                for &y in &boundary[i + 1..] {
                    adj[x][y] = true;
                    adj[y][x] = true;
                }
            }
        }
        adj
    }
}

/// Breadth-first separation in an adjacency matrix.
pub(crate) fn separated(adj: &[Vec<bool>], keep: &[bool], a: &[usize], b: &[usize], c: &[usize]) -> bool {
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let n = adj.len();
    let mut blocked = vec![false; n];
    for &x in c {
        blocked[x] = true;
    }
    let mut target = vec![false; n];
    for &x in b {
        target[x] = true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &x in a {
        seen[x] = true;
        queue.push_back(x);
    }
    while let Some(u) = queue.pop_front() {
        if target[u] {
            return false;
        }
        for w in 0..n {
            if adj[u][w] && keep[w] && !blocked[w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    true
}

/// A directed cycle (self-loops included) in an adjacency-list digraph.
pub(crate) fn directed_cycle(succ: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let n = succ.len();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, succ[root].iter().copied().collect())];
        state[root] = 1;
        while let Some((u, pending)) = stack.last_mut() {
            let u = *u;
            match pending.pop() {
                Some(w) if state[w] == 1 => {
                    let mut cycle = vec![u];
                    let mut cur = u;
                    while cur != w {
                        cur = parent[cur];
                        cycle.push(cur);
                    }
                    cycle.reverse();
                    return Some(cycle);
                }
                Some(w) if state[w] == 0 => {
                    state[w] = 1;
                    parent[w] = u;
                    stack.push((w, succ[w].iter().copied().collect()));
                }
                Some(_) => {}
                None => {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// Topological order of a digraph, or `None` when cyclic.
pub(crate) fn topological_order(succ: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut indeg = vec![0usize; n];
    for s in succ {
        for &w in s {
            indeg[w] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = ready.pop_first() {
        order.push(u);
        for &w in &succ[u] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}
