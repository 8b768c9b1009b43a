//! Interventions: graph surgery, normal forms and intervened joints.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain_graph::ChainGraph;
use crate::dah::{Dah, Hyperedge};
use crate::error::{Error, Result};
use crate::factor::{Domains, Factor, JointTable};
use crate::factorization::{cg_plans, dah_plans, evaluate, ComplementRule, FactorAssignment, ScopeMap};
use crate::scalar::Scalar;
use crate::vertex::{VertexId, VertexSet};

/// Forced values for a set of variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InterventionSpec {
    pub values: BTreeMap<VertexId, String>,
}

impl InterventionSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, state: &str) -> Self {
        self.values.insert(var.into(), state.to_string());
        self
    }

    pub fn targets(&self) -> VertexSet {
        self.values.keys().cloned().collect()
    }

    /// State indices of the forced values.
    pub fn resolve(&self, domains: &Domains) -> Result<BTreeMap<VertexId, usize>> {
        self.values
            .iter()
            .map(|(v, s)| Ok((v.clone(), domains.state_index(v, s)?)))
            .collect()
    }
}

fn check_subset(vertices: &VertexSet, a: &VertexSet) -> Result<()> {
    match a.iter().find(|v| !vertices.contains(*v)) {
        Some(v) => Err(Error::UnknownVertex(v.clone())),
        None => Ok(()),
    }
}

/// Lines at intervened vertices point away from them; arcs into intervened vertices are removed.
/// A line with both ends intervened is removed.
pub fn cg_redirect(g: &ChainGraph, a: &VertexSet) -> Result<ChainGraph> {
    check_subset(g.vertices(), a)?;
    let mut arcs: BTreeSet<(VertexId, VertexId)> = g.directed().clone();
    let mut lines = BTreeSet::new();
    for (u, w) in g.undirected() {
        match (a.contains(u), a.contains(w)) {
            (true, true) => {}
            (true, false) => {
                arcs.insert((u.clone(), w.clone()));
            }
            (false, true) => {
                arcs.insert((w.clone(), u.clone()));
            }
            (false, false) => {
                lines.insert((u.clone(), w.clone()));
            }
        }
    }
    arcs.retain(|(_, w)| !a.contains(w));
    ChainGraph::new(g.vertices().iter().cloned(), arcs, lines)
}

/// Removes the vertices in `a` and their edges.
pub fn cg_delete(g: &ChainGraph, a: &VertexSet) -> Result<ChainGraph> {
    check_subset(g.vertices(), a)?;
    g.induced(&g.vertices().difference(a).cloned().collect())
}

/// Moves intervened head vertices into the tail; edges left with an empty head are dropped.
pub fn dah_redirect(h: &Dah, a: &VertexSet) -> Result<Dah> {
    check_subset(h.vertices(), a)?;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for e in h.edges() {
        let moved: VertexSet = e.head().intersection(a).cloned().collect();
        let head: VertexSet = e.head().difference(&moved).cloned().collect();
        if head.is_empty() {
            continue;
        }
        let tail: VertexSet = e.tail().union(&moved).cloned().collect();
        let edge = Hyperedge::new(tail, head)?;
        if seen.insert(edge.clone()) {
            edges.push(edge);
        }
    }
    Dah::new(h.vertices().iter().cloned(), edges)
}

/// Shrinks every edge by `a`, then drops empty-head and dominated edges, until stable.
/// The vertex set is kept.
pub fn dah_normalize(h: &Dah, a: &VertexSet) -> Result<Dah> {
    check_subset(h.vertices(), a)?;
    let mut edges: Vec<(VertexSet, VertexSet)> =
        h.edges().iter().map(|e| (e.tail().clone(), e.head().clone())).collect();
    loop {
        let before = edges.clone();
        for (t, hd) in edges.iter_mut() {
            t.retain(|v| !a.contains(v));
            hd.retain(|v| !a.contains(v));
        }
        edges.retain(|(_, hd)| !hd.is_empty());
        let mut kept: Vec<(VertexSet, VertexSet)> = Vec::new();
        for (i, (t, hd)) in edges.iter().enumerate() {
            let dominated = edges.iter().enumerate().any(|(j, (t2, h2))| {
                j != i && t.is_subset(t2) && hd.is_subset(h2) && ((t, hd) != (t2, h2) || j < i)
            });
            if !dominated {
                kept.push((t.clone(), hd.clone()));
            }
        }
        edges = kept;
        if edges == before {
            break;
        }
    }
    let edges = edges
        .into_iter()
        .map(|(t, hd)| Hyperedge::new(t, hd))
        .collect::<Result<Vec<_>>>()?;
    Dah::new(h.vertices().iter().cloned(), edges)
}

/// Whether deleting the targets leaves the same chain graph.
pub fn factorization_equivalent_cg(g1: &ChainGraph, a1: &VertexSet, g2: &ChainGraph, a2: &VertexSet) -> Result<bool> {
    Ok(cg_delete(g1, a1)? == cg_delete(g2, a2)?)
}

/// Whether the normal forms agree on the remaining vertices and on their edges.
pub fn factorization_equivalent_dah(h1: &Dah, a1: &VertexSet, h2: &Dah, a2: &VertexSet) -> Result<bool> {
    let (n1, n2) = (dah_normalize(h1, a1)?, dah_normalize(h2, a2)?);
    let rest1: VertexSet = n1.vertices().difference(a1).cloned().collect();
    let rest2: VertexSet = n2.vertices().difference(a2).cloned().collect();
    Ok(rest1 == rest2 && n1.edge_set() == n2.edge_set())
}

/// Joint after forcing `spec`: each component is renormalized over its non-intervened part,
/// and configurations that disagree with `spec` get zero.
pub fn intervened_joint<T: Scalar>(
    h: &Dah,
    domains: &Domains,
    fa: &FactorAssignment<T>,
    spec: &InterventionSpec,
) -> Result<JointTable<T>> {
    intervened_joint_with(h, domains, fa, &[], spec)
}

/// [`intervened_joint`] with complement rules for some components.
pub fn intervened_joint_with<T: Scalar>(
    h: &Dah,
    domains: &Domains,
    fa: &FactorAssignment<T>,
    rules: &[ComplementRule],
    spec: &InterventionSpec,
) -> Result<JointTable<T>> {
    check_subset(h.vertices(), &spec.targets())?;
    let clamp = spec.resolve(domains)?;
    let plans = dah_plans(h, fa, rules, domains)?;
    evaluate(h.vertices(), domains, &plans, &clamp)
}

/// Chain-graph version of [`intervened_joint`], factors keyed by moral cliques.
pub fn cg_intervened_joint<T: Scalar>(
    g: &ChainGraph,
    domains: &Domains,
    fa: &FactorAssignment<T>,
    spec: &InterventionSpec,
) -> Result<JointTable<T>> {
    check_subset(g.vertices(), &spec.targets())?;
    let clamp = spec.resolve(domains)?;
    let plans = cg_plans(g, fa, domains)?;
    evaluate(g.vertices(), domains, &plans, &clamp)
}

/// Carries a factor system across a surgery.
///
/// Each source factor is clamped at `spec` and multiplied into a target scope that contains
/// what is left of it. Factors acting only on intervened vertices of their component are
/// dropped, since they cancel in the normalization. Target components made only of intervened
/// vertices receive indicator factors of the forced values.
pub fn transfer_factors<T: Scalar>(
    domains: &Domains,
    source_scopes: &ScopeMap,
    source: &FactorAssignment<T>,
    spec: &InterventionSpec,
    target_scopes: &ScopeMap,
) -> Result<FactorAssignment<T>> {
    let clamp = spec.resolve(domains)?;
    let targets = spec.targets();
    let mut acc: BTreeMap<(VertexSet, VertexSet), Factor<T>> = BTreeMap::new();
    for (comp, scopes) in target_scopes {
        for scope in scopes {
            acc.insert(
                (comp.clone(), scope.clone()),
                Factor::ones(scope.iter().cloned().collect(), domains)?,
            );
        }
    }
    for (tau, factors) in source.resolve(source_scopes)? {
        for f in factors {
            let free: VertexSet = f
                .scope_set()
                .intersection(&tau)
                .filter(|v| !targets.contains(*v))
                .cloned()
                .collect();
            if free.is_empty() {
                continue;
            }
            let clamped = f.clamp(&clamp);
            let rest = clamped.scope_set();
            let slot = acc
                .keys()
                .find(|(comp, scope)| !comp.is_disjoint(&free) && rest.is_subset(scope))
                .cloned()
                .ok_or_else(|| Error::InvalidFactor {
                    scope: clamped.scope().to_vec(),
                    reason: "no target scope contains it".into(),
                })?;
            let cur = acc.get_mut(&slot).unwrap();
            let product = cur.multiply(&clamped);
            *cur = product.extend(slot.1.iter().cloned().collect(), domains)?;
        }
    }
    for (comp, scopes) in target_scopes {
        if !comp.is_subset(&targets) {
            continue;
        }
        for v in comp {
            let scope = scopes.iter().find(|s| s.contains(v)).ok_or_else(|| Error::InvalidFactor {
                scope: vec![v.clone()],
                reason: "no target scope contains it".into(),
            })?;
            let key = (comp.clone(), scope.clone());
            let cur = acc.get_mut(&key).unwrap();
            let ind = Factor::indicator(v.clone(), clamp[v], domains)?;
            *cur = cur.multiply(&ind).extend(scope.iter().cloned().collect(), domains)?;
        }
    }
    let mut fa = FactorAssignment::default();
    for ((comp, _), f) in acc {
        fa.push_for(comp, f);
    }
    Ok(fa)
}

/// Point mass at the forced values, as a joint over the targets.
pub fn point_mass<T: Scalar>(domains: &Domains, spec: &InterventionSpec) -> Result<JointTable<T>> {
    let clamp = spec.resolve(domains)?;
    let vars = spec.targets();
    let order: Vec<usize> = vars.iter().map(|v| clamp[v]).collect();
    JointTable::from_unnormalized(&vars, domains, |c| if c == order.as_slice() { T::one() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{assemble_joint, cg_factor_scopes, factor_scopes, factors_for_scopes};
    use crate::projection::hypermoralize;
    use crate::vertex::vertex_set;

    fn e(t: &[&str], h: &[&str]) -> Hyperedge {
        Hyperedge::from_labels(t, h).unwrap()
    }

    fn s(l: &[&str]) -> VertexSet {
        vertex_set(l)
    }

    fn fig7a() -> ChainGraph {
        ChainGraph::from_labels(
            &[("a", "c"), ("a", "d"), ("a", "e"), ("b", "d"), ("b", "e")],
            &[("c", "d"), ("d", "e")],
            &[],
        )
        .unwrap()
    }

    fn fig8b() -> Dah {
        Dah::from_edges(
            vec![e(&["a"], &["c", "d"]), e(&["a", "b"], &["d", "e"]), e(&["a", "b"], &["d"])],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn redirect_figure_seven() {
        let g = cg_redirect(&fig7a(), &s(&["c"])).unwrap();
        assert_eq!(
            g.chain_components().components,
            vec![s(&["a"]), s(&["b"]), s(&["c"]), s(&["d", "e"])]
        );
        assert!(g.directed().contains(&("c".into(), "d".into())));
        assert!(!g.directed().contains(&("a".into(), "c".into())));
        assert_eq!(cg_redirect(&fig7a(), &s(&[])).unwrap(), fig7a());
    }

    #[test]
    fn redirect_collider_and_inner_line() {
        let col = ChainGraph::from_labels(&[("a", "c"), ("b", "c")], &[], &[]).unwrap();
        let g = cg_redirect(&col, &s(&["c"])).unwrap();
        assert!(g.directed().is_empty());
        let line = ChainGraph::from_labels(&[], &[("x", "y"), ("y", "z")], &[]).unwrap();
        let g = cg_redirect(&line, &s(&["x", "y"])).unwrap();
        assert!(g.undirected().is_empty());
        assert_eq!(g.directed().iter().cloned().collect::<Vec<_>>(), vec![("y".into(), "z".into())]);
        assert!(matches!(cg_redirect(&line, &s(&["q"])), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn delete() {
        let g0 = cg_delete(&fig7a(), &s(&["c"])).unwrap();
        assert_eq!(g0.vertices(), &s(&["a", "b", "d", "e"]));
        assert_eq!(g0.directed().len(), 4);
        assert_eq!(g0.undirected().len(), 1);
        assert_eq!(cg_delete(&fig7a(), &s(&[])).unwrap(), fig7a());
        assert!(cg_delete(&fig7a(), fig7a().vertices()).unwrap().vertices().is_empty());
    }

    #[test]
    fn redirect_figure_eight() {
        let hat = dah_redirect(&fig8b(), &s(&["c"])).unwrap();
        let expected = Dah::from_edges(
            vec![e(&["a", "c"], &["d"]), e(&["a", "b"], &["d", "e"]), e(&["a", "b"], &["d"])],
            &[],
        )
        .unwrap();
        assert_eq!(hat, expected);
        assert_eq!(dah_redirect(&fig8b(), &s(&[])).unwrap(), fig8b());
        let single = Dah::from_edges(vec![e(&["x"], &["y"])], &[]).unwrap();
        assert!(dah_redirect(&single, &s(&["y"])).unwrap().edges().is_empty());
    }

    #[test]
    fn normal_forms() {
        let n = dah_normalize(&fig8b(), &s(&["c"])).unwrap();
        assert_eq!(n.edges(), &[e(&["a", "b"], &["d", "e"])]);
        let hat = dah_redirect(&fig8b(), &s(&["c"])).unwrap();
        assert_eq!(dah_normalize(&hat, &s(&["c"])).unwrap(), n);
        let dom = Dah::from_edges(vec![e(&["x"], &["y"]), e(&["x"], &["y", "z"])], &[]).unwrap();
        assert_eq!(dah_normalize(&dom, &s(&[])).unwrap().edges(), &[e(&["x"], &["y", "z"])]);
        assert_eq!(dah_normalize(&n, &s(&[])).unwrap(), n);
    }

    #[test]
    fn equivalence_predicates() {
        let g = fig7a();
        let c = s(&["c"]);
        assert!(factorization_equivalent_cg(&g, &c, &cg_redirect(&g, &c).unwrap(), &c).unwrap());
        assert!(factorization_equivalent_cg(&g, &s(&[]), &g, &s(&[])).unwrap());
        let g1 = ChainGraph::from_labels(&[("x", "y")], &[], &[]).unwrap();
        let g2 = ChainGraph::from_labels(&[], &[("x", "y")], &[]).unwrap();
        assert!(!factorization_equivalent_cg(&g1, &s(&[]), &g2, &s(&[])).unwrap());
        let hat = dah_redirect(&fig8b(), &c).unwrap();
        assert!(factorization_equivalent_dah(&fig8b(), &c, &hat, &c).unwrap());
        let entry1 = Dah::from_edges(vec![e(&["a", "b"], &["c"])], &[]).unwrap();
        let entry3 = Dah::from_edges(vec![e(&["a"], &["c"]), e(&["b"], &["c"])], &[]).unwrap();
        assert!(!factorization_equivalent_dah(&entry1, &s(&[]), &entry3, &s(&[])).unwrap());
    }

    #[test]
    fn empty_spec_is_plain_assembly() {
        let h = fig8b();
        let d = Domains::binary(h.vertices());
        let mut k = 0.0;
        let fa = factors_for_scopes(&factor_scopes(&h), &d, || {
            k += 0.37;
            1.0 + (k * 7.0f64).sin().abs()
        })
        .unwrap();
        let plain = assemble_joint(&h, &d, &fa).unwrap();
        let forced = intervened_joint(&h, &d, &fa, &InterventionSpec::new()).unwrap();
        assert_eq!(plain.max_abs_diff(&forced), Some(0.0));
    }

    #[test]
    fn forcing_zeroes_other_states_and_matches_redirect() {
        let h = fig8b();
        let d = Domains::binary(h.vertices());
        let mut k = 0.0;
        let fa = factors_for_scopes(&factor_scopes(&h), &d, || {
            k += 0.61;
            0.2 + (k * 3.0f64).cos().abs()
        })
        .unwrap();
        let spec = InterventionSpec::new().with("c", "0");
        let j = intervened_joint(&h, &d, &fa, &spec).unwrap();
        for i in 0..j.len() {
            if j.configuration(i)[2] == 1 {
                assert_eq!(j.table()[i], 0.0);
            }
        }
        assert!((j.total() - 1.0).abs() < 1e-12);
        let hat = dah_redirect(&h, &s(&["c"])).unwrap();
        let moved = transfer_factors(&d, &factor_scopes(&h), &fa, &spec, &factor_scopes(&hat)).unwrap();
        let via = assemble_joint(&hat, &d, &moved).unwrap();
        assert!(j.max_abs_diff(&via).unwrap() < 1e-12);
    }

    #[test]
    fn chain_graph_route() {
        let g = fig7a();
        let h = hypermoralize(&g);
        let d = Domains::binary(g.vertices());
        let mut k = 0.0;
        let fa = factors_for_scopes(&cg_factor_scopes(&g), &d, || {
            k += 0.29;
            0.1 + (k * 5.0f64).sin().abs()
        })
        .unwrap();
        let spec = InterventionSpec::new().with("c", "1");
        let direct = cg_intervened_joint(&g, &d, &fa, &spec).unwrap();
        let on_h = intervened_joint(&h, &d, &fa, &spec).unwrap();
        assert!(direct.max_abs_diff(&on_h).unwrap() < 1e-12);
        let ghat = cg_redirect(&g, &s(&["c"])).unwrap();
        let moved = transfer_factors(&d, &cg_factor_scopes(&g), &fa, &spec, &cg_factor_scopes(&ghat)).unwrap();
        let via = crate::factorization::cg_assemble_joint(&ghat, &d, &moved).unwrap();
        assert!(direct.max_abs_diff(&via).unwrap() < 1e-12);
    }

    #[test]
    fn invalid_state_rejected() {
        let h = fig8b();
        let d = Domains::binary(h.vertices());
        let fa = factors_for_scopes(&factor_scopes(&h), &d, || 1.0).unwrap();
        let spec = InterventionSpec::new().with("c", "7");
        assert!(matches!(intervened_joint(&h, &d, &fa, &spec), Err(Error::InvalidState { .. })));
    }
}
