//! Factor scopes of a structure and assembly of joint tables from factors.

use std::collections::{BTreeMap, BTreeSet};

use crate::chain_graph::ChainGraph;
use crate::dah::{Dah, Hyperedge};
use crate::error::{Error, Result};
use crate::factor::{Domains, Factor, JointTable, Layout};
use crate::scalar::{product, Scalar};
use crate::vertex::{VertexId, VertexSet};

/// Required factor scopes, per chain component.
pub type ScopeMap = BTreeMap<VertexSet, Vec<VertexSet>>;

/// Factors for a structure, optionally pinned to a chain component.
///
/// An unpinned factor serves every component that requires its scope.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorAssignment<T = f64> {
    entries: Vec<(Option<VertexSet>, Factor<T>)>,
}

impl<T> Default for FactorAssignment<T> {
    fn default() -> Self {
        FactorAssignment { entries: Vec::new() }
    }
}

impl<T: Scalar> FactorAssignment<T> {
    pub fn new(factors: Vec<Factor<T>>) -> Self {
        FactorAssignment {
            entries: factors.into_iter().map(|f| (None, f)).collect(),
        }
    }

    pub fn push(&mut self, factor: Factor<T>) {
        self.entries.push((None, factor));
    }

    pub fn push_for(&mut self, component: VertexSet, factor: Factor<T>) {
        self.entries.push((Some(component), factor));
    }

    pub fn entries(&self) -> &[(Option<VertexSet>, Factor<T>)] {
        &self.entries
    }

    /// The factor with scope `scope`, if exactly one exists.
    pub fn get(&self, scope: &VertexSet) -> Option<&Factor<T>> {
        let mut it = self.entries.iter().filter(|(_, f)| f.scope_set() == *scope);
        match (it.next(), it.next()) {
            (Some((_, f)), None) => Some(f),
            _ => None,
        }
    }

    /// Matches factors to the required scopes, one factor per (component, scope).
    pub fn resolve(&self, required: &ScopeMap) -> Result<BTreeMap<VertexSet, Vec<&Factor<T>>>> {
        let mut used = vec![false; self.entries.len()];
        let mut missing = Vec::new();
        let mut extra = BTreeSet::new();
        let mut out = BTreeMap::new();
        for (comp, scopes) in required {
            let mut chosen = Vec::new();
            for scope in scopes {
                let hits: Vec<usize> = (0..self.entries.len())
                    .filter(|&i| {
                        let (pin, f) = &self.entries[i];
                        f.scope_set() == *scope && pin.as_ref().map_or(true, |p| p == comp)
                    })
                    .collect();
                match hits.as_slice() {
                    [] => missing.push(scope.clone()),
                    [i] => {
                        used[*i] = true;
                        chosen.push(&self.entries[*i].1);
                    }
                    _ => {
                        for &i in &hits {
                            used[i] = true;
                        }
                        extra.insert(scope.clone());
                    }
                }
            }
            out.insert(comp.clone(), chosen);
        }
        for (i, (_, f)) in self.entries.iter().enumerate() {
            if !used[i] {
                extra.insert(f.scope_set());
            }
        }
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::ScopeMismatch {
                missing,
                extra: extra.into_iter().collect(),
            });
        }
        Ok(out)
    }
}

/// Edges of the hypergraph induced on `τ ∪ pa(τ)` whose head is a non-empty subset of `τ`.
pub fn h_star(h: &Dah, tau: &VertexSet) -> Result<Dah> {
    if h.chain_components().position(tau).is_none() {
        return Err(Error::NotAComponent(tau.clone()));
    }
    let mut scope = h.parents_of_set(tau)?;
    scope.extend(tau.iter().cloned());
    let induced = h.induced(&scope)?;
    let edges = induced
        .edges()
        .iter()
        .filter(|e| !e.head().is_empty() && e.head().is_subset(tau))
        .cloned()
        .collect();
    Ok(Dah::assemble(scope, edges))
}

/// Inclusion-maximal `tail ∪ head` sets, sorted.
pub fn maximal_edges(edges: &[Hyperedge]) -> Vec<VertexSet> {
    let sets: BTreeSet<VertexSet> = edges.iter().map(Hyperedge::vertices).collect();
    sets.iter()
        .filter(|s| !sets.iter().any(|o| o != *s && s.is_subset(o)))
        .cloned()
        .collect()
}

/// Per component, the maximal edges of its `h_star`; a component without edges gets itself.
pub fn factor_scopes(h: &Dah) -> ScopeMap {
    h.chain_components()
        .components
        .into_iter()
        .map(|tau| {
            let star = h_star(h, &tau).expect("component of h");
            let mut scopes = maximal_edges(star.edges());
            if scopes.is_empty() {
                scopes.push(tau.clone());
            }
            (tau, scopes)
        })
        .collect()
}

/// Per component, the maximal cliques of the moral graph of `G` restricted to `τ ∪ pa(τ)`.
pub fn cg_factor_scopes(g: &ChainGraph) -> ScopeMap {
    g.chain_components()
        .components
        .into_iter()
        .map(|tau| {
            let mut scope = g.parents_of_set(&tau).expect("component of g");
            scope.extend(tau.iter().cloned());
            let cliques = g.induced(&scope).expect("subset of g").moral_graph().maximal_cliques();
            (tau, cliques)
        })
        .collect()
}

/// How a component's conditional table is normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalization {
    /// Divide by the sum over the component's configurations.
    Partition,
    /// Binary single-vertex component: the product at `reference` is taken as its probability
    /// and the other state receives the complement.
    Complement { reference: usize },
}

/// Complement rule for a binary child.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplementRule {
    pub child: VertexId,
    pub reference: String,
}

pub(crate) struct ComponentPlan<'a, T> {
    pub component: VertexSet,
    pub parents: VertexSet,
    pub factors: Vec<&'a Factor<T>>,
    pub normalization: Normalization,
}

fn labelled(layout: &Layout, config: &[usize], keep: &[usize], domains: &Domains) -> Vec<(VertexId, String)> {
    keep.iter()
        .map(|&p| {
            let v = &layout.vars[p];
            (v.clone(), domains.states(v).unwrap()[config[p]].clone())
        })
        .collect()
}

/// Conditional table of one component over `sorted(pa ∪ τ)`, normalized over `τ \ A`.
fn conditional<T: Scalar>(
    plan: &ComponentPlan<'_, T>,
    domains: &Domains,
    clamp: &BTreeMap<VertexId, usize>,
) -> Result<(Layout, Vec<T>)> {
    let vars: Vec<VertexId> = plan.parents.union(&plan.component).cloned().collect();
    let layout = Layout::new(vars, domains)?;
    let free: Vec<usize> = (0..layout.vars.len())
        .filter(|&i| plan.component.contains(&layout.vars[i]) && !clamp.contains_key(&layout.vars[i]))
        .collect();
    let fixed: Vec<usize> = (0..layout.vars.len()).filter(|i| !free.contains(i)).collect();
    let fixed_layout = Layout::from_sizes(
        fixed.iter().map(|&i| layout.vars[i].clone()).collect(),
        fixed.iter().map(|&i| layout.sizes[i]).collect(),
    );
    let positions: Vec<Vec<usize>> = plan.factors.iter().map(|f| layout.positions(f.scope())).collect();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); fixed_layout.len];
    for i in 0..layout.len {
        let c = layout.decode(i);
        blocks[Layout::project(&c, &fixed, &fixed_layout)].push(i);
    }
    let mut table = vec![T::zero(); layout.len];
    for block in blocks {
        let first = layout.decode(block[0]);
        let consistent = fixed
            .iter()
            .all(|&p| clamp.get(&layout.vars[p]).map_or(true, |&s| first[p] == s));
        if !consistent {
            continue;
        }
        if free.is_empty() {
            table[block[0]] = T::one();
            continue;
        }
        let rows: Vec<Vec<T>> = block
            .iter()
            .map(|&i| {
                let c = layout.decode(i);
                plan.factors
                    .iter()
                    .zip(&positions)
                    .map(|(f, pos)| f.table()[Layout::project(&c, pos, f.layout())].clone())
                    .collect()
            })
            .collect();
        let zero = || Error::ZeroNormalizer {
            component: plan.component.clone(),
            configuration: labelled(&layout, &first, &fixed, domains),
        };
        let values = match plan.normalization {
            Normalization::Partition => T::normalized_products(&rows).ok_or_else(zero)?,
            Normalization::Complement { reference } => {
                if free.len() != 1 || layout.sizes[free[0]] != 2 {
                    return Err(Error::InvalidDomain {
                        variable: layout.vars[free[0]].clone(),
                        reason: "complement rule needs a single binary child".into(),
                    });
                }
                let at = |i: usize| layout.decode(block[i])[free[0]];
                let r = (0..2).find(|&i| at(i) == reference).expect("binary block");
                let p = product(&rows[r]);
                if p > T::one() {
                    return Err(Error::InvalidProbability(p.to_f64()));
                }
                let mut out = vec![T::one() - p.clone(); 2];
                out[r] = p;
                out
            }
        };
        for (&i, v) in block.iter().zip(values) {
            table[i] = v;
        }
    }
    Ok((layout, table))
}

/// Product of per-component conditionals over `vertices`, zero off the clamped values.
pub(crate) fn evaluate<T: Scalar>(
    vertices: &VertexSet,
    domains: &Domains,
    plans: &[ComponentPlan<'_, T>],
    clamp: &BTreeMap<VertexId, usize>,
) -> Result<JointTable<T>> {
    domains.check_covers(vertices)?;
    let tables = plans
        .iter()
        .map(|p| conditional(p, domains, clamp))
        .collect::<Result<Vec<_>>>()?;
    let layout = Layout::new(vertices.iter().cloned().collect(), domains)?;
    let positions: Vec<Vec<usize>> = tables.iter().map(|(l, _)| layout.positions(&l.vars)).collect();
    let clamp_pos: Vec<(usize, usize)> = clamp
        .iter()
        .filter_map(|(v, &s)| layout.vars.iter().position(|w| w == v).map(|p| (p, s)))
        .collect();
    let table = (0..layout.len)
        .map(|i| {
            let c = layout.decode(i);
            if clamp_pos.iter().any(|&(p, s)| c[p] != s) {
                return T::zero();
            }
            tables
                .iter()
                .zip(&positions)
                .fold(T::one(), |acc, ((l, t), pos)| acc * t[Layout::project(&c, pos, l)].clone())
        })
        .collect();
    Ok(JointTable::from_parts(layout, table))
}

pub(crate) fn dah_plans<'a, T: Scalar>(
    h: &Dah,
    fa: &'a FactorAssignment<T>,
    rules: &[ComplementRule],
    domains: &Domains,
) -> Result<Vec<ComponentPlan<'a, T>>> {
    let mut resolved = fa.resolve(&factor_scopes(h))?;
    plans_from(resolved.iter_mut().map(|(c, f)| (c.clone(), std::mem::take(f))), |tau| h.parents_of_set(tau), rules, domains)
}

pub(crate) fn cg_plans<'a, T: Scalar>(
    g: &ChainGraph,
    fa: &'a FactorAssignment<T>,
    domains: &Domains,
) -> Result<Vec<ComponentPlan<'a, T>>> {
    let mut resolved = fa.resolve(&cg_factor_scopes(g))?;
    plans_from(resolved.iter_mut().map(|(c, f)| (c.clone(), std::mem::take(f))), |tau| g.parents_of_set(tau), &[], domains)
}

fn plans_from<'a, T: Scalar>(
    resolved: impl Iterator<Item = (VertexSet, Vec<&'a Factor<T>>)>,
    parents: impl Fn(&VertexSet) -> Result<VertexSet>,
    rules: &[ComplementRule],
    domains: &Domains,
) -> Result<Vec<ComponentPlan<'a, T>>> {
    let mut plans = Vec::new();
    let mut unused: BTreeSet<&VertexId> = rules.iter().map(|r| &r.child).collect();
    for (component, factors) in resolved {
        let mut normalization = Normalization::Partition;
        if let Some(rule) = rules.iter().find(|r| component.len() == 1 && component.contains(&r.child)) {
            unused.remove(&rule.child);
            normalization = Normalization::Complement {
                reference: domains.state_index(&rule.child, &rule.reference)?,
            };
        }
        plans.push(ComponentPlan {
            parents: parents(&component)?,
            component,
            factors,
            normalization,
        });
    }
    if let Some(v) = unused.into_iter().next() {
        return Err(Error::InvalidDomain {
            variable: v.clone(),
            reason: "complement rule needs a single-vertex chain component".into(),
        });
    }
    Ok(plans)
}

/// Joint table of a factor system on a hypergraph, each component normalized over its own states.
pub fn assemble_joint<T: Scalar>(h: &Dah, domains: &Domains, fa: &FactorAssignment<T>) -> Result<JointTable<T>> {
    assemble_joint_with(h, domains, fa, &[])
}

/// As [`assemble_joint`], with complement normalization for the listed binary children.
pub fn assemble_joint_with<T: Scalar>(
    h: &Dah,
    domains: &Domains,
    fa: &FactorAssignment<T>,
    rules: &[ComplementRule],
) -> Result<JointTable<T>> {
    let plans = dah_plans(h, fa, rules, domains)?;
    evaluate(h.vertices(), domains, &plans, &BTreeMap::new())
}

/// Joint table of a factor system on a chain graph, factors keyed by moral cliques.
pub fn cg_assemble_joint<T: Scalar>(
    g: &ChainGraph,
    domains: &Domains,
    fa: &FactorAssignment<T>,
) -> Result<JointTable<T>> {
    let plans = cg_plans(g, fa, domains)?;
    evaluate(g.vertices(), domains, &plans, &BTreeMap::new())
}

/// Factors of the given scopes filled by `fill` (called once per entry, in scope order).
pub fn factors_for_scopes<T: Scalar>(
    scopes: &ScopeMap,
    domains: &Domains,
    mut fill: impl FnMut() -> T,
) -> Result<FactorAssignment<T>> {
    let mut fa = FactorAssignment::default();
    let mut seen = BTreeSet::new();
    for (comp, list) in scopes {
        for scope in list {
            let shared = scopes.iter().filter(|(_, l)| l.contains(scope)).count() > 1;
            if shared {
                let layout = Layout::new(scope.iter().cloned().collect(), domains)?;
                let table = (0..layout.len).map(|_| fill()).collect();
                fa.push_for(comp.clone(), Factor::new(layout.vars, table, domains)?);
            } else if seen.insert(scope.clone()) {
                let layout = Layout::new(scope.iter().cloned().collect(), domains)?;
                let table = (0..layout.len).map(|_| fill()).collect();
                fa.push(Factor::new(layout.vars, table, domains)?);
            }
        }
    }
    Ok(fa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::hypermoralize;
    use crate::vertex::vertex_set;

    fn e(t: &[&str], h: &[&str]) -> Hyperedge {
        Hyperedge::from_labels(t, h).unwrap()
    }

    fn s(l: &[&str]) -> VertexSet {
        vertex_set(l)
    }

    fn fig6() -> ChainGraph {
        ChainGraph::from_labels(
            &[("a", "d"), ("a", "e"), ("b", "e"), ("c", "e"), ("c", "f")],
            &[("d", "e"), ("e", "f")],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn maximal_edges_examples() {
        assert_eq!(maximal_edges(&[e(&["a"], &["b"]), e(&["a"], &["b", "c"])]), vec![s(&["a", "b", "c"])]);
        assert_eq!(maximal_edges(&[e(&["x"], &["y"])]), vec![s(&["x", "y"])]);
        let h = hypermoralize(&fig6());
        assert_eq!(
            maximal_edges(h.edges()),
            vec![s(&["a", "b", "c", "e"]), s(&["a", "d", "e"]), s(&["c", "e", "f"])]
        );
    }

    #[test]
    fn h_star_examples() {
        let h = hypermoralize(&fig6());
        let star = h_star(&h, &s(&["d", "e", "f"])).unwrap();
        assert_eq!(star.edges().len(), h.edges().len());
        let a = h_star(&h, &s(&["a"])).unwrap();
        assert!(a.edges().is_empty());
        assert_eq!(h_star(&h, &s(&["d"])), Err(Error::NotAComponent(s(&["d"]))));
        let fig8b = Dah::from_edges(
            vec![e(&["a"], &["c", "d"]), e(&["a", "b"], &["d", "e"]), e(&["a", "b"], &["d"])],
            &[],
        )
        .unwrap();
        let star = h_star(&fig8b, &s(&["c", "d", "e"])).unwrap();
        let fully: BTreeSet<VertexSet> = maximal_edges(star.edges()).into_iter().collect();
        assert_eq!(fully, BTreeSet::from([s(&["a", "c", "d"]), s(&["a", "b", "d", "e"])]));
    }

    #[test]
    fn table_one_scopes() {
        let entry1 = Dah::from_edges(vec![e(&["a", "b"], &["c"])], &[]).unwrap();
        let entry3 = Dah::from_edges(vec![e(&["a"], &["c"]), e(&["b"], &["c"])], &[]).unwrap();
        assert_eq!(factor_scopes(&entry1)[&s(&["c"])], vec![s(&["a", "b", "c"])]);
        assert_eq!(factor_scopes(&entry3)[&s(&["c"])], vec![s(&["a", "c"]), s(&["b", "c"])]);
        assert_eq!(factor_scopes(&entry3)[&s(&["a"])], vec![s(&["a"])]);
        let fig42 = Dah::from_edges(
            vec![e(&["a", "b"], &["c"]), e(&["a", "b"], &["d"]), e(&[], &["c", "d"])],
            &[],
        )
        .unwrap();
        assert_eq!(
            factor_scopes(&fig42)[&s(&["c", "d"])],
            vec![s(&["a", "b", "c"]), s(&["a", "b", "d"]), s(&["c", "d"])]
        );
    }

    #[test]
    fn all_ones_gives_uniform() {
        let h = Dah::from_edges(vec![e(&["a"], &["c"]), e(&["b"], &["c"])], &[]).unwrap();
        let d = Domains::binary(h.vertices());
        let fa = factors_for_scopes(&factor_scopes(&h), &d, || 1.0).unwrap();
        let j: JointTable = assemble_joint(&h, &d, &fa).unwrap();
        assert_eq!(j.len(), 8);
        assert!(j.table().iter().all(|&p| (p - 0.125).abs() < 1e-15));
    }

    #[test]
    fn scope_mismatch_reported() {
        let h = Dah::from_edges(vec![e(&["a"], &["c"]), e(&["b"], &["c"])], &[]).unwrap();
        let d = Domains::binary(h.vertices());
        let mut fa = factors_for_scopes(&factor_scopes(&h), &d, || 1.0).unwrap();
        fa.push(Factor::ones(vec!["a".into(), "b".into()], &d).unwrap());
        match assemble_joint(&h, &d, &fa) {
            Err(Error::ScopeMismatch { missing, extra }) => {
                assert!(missing.is_empty());
                assert_eq!(extra, vec![s(&["a", "b"])]);
            }
            other => panic!("{other:?}"),
        }
        let fa = FactorAssignment::<f64>::default();
        assert!(matches!(assemble_joint(&h, &d, &fa), Err(Error::ScopeMismatch { .. })));
    }

    #[test]
    fn zero_normalizer_names_configuration() {
        let h = Dah::from_edges(vec![e(&["a"], &["c"])], &[]).unwrap();
        let d = Domains::binary(h.vertices());
        let fa = FactorAssignment::new(vec![
            Factor::new(vec!["a".into()], vec![1.0, 1.0], &d).unwrap(),
            Factor::new(vec!["a".into(), "c".into()], vec![1.0, 1.0, 0.0, 0.0], &d).unwrap(),
        ]);
        match assemble_joint(&h, &d, &fa) {
            Err(Error::ZeroNormalizer { component, configuration }) => {
                assert_eq!(component, s(&["c"]));
                assert_eq!(configuration, vec![("a".into(), "1".to_string())]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn figure_six_cg_scopes() {
        let scopes = cg_factor_scopes(&fig6());
        assert_eq!(
            scopes[&s(&["d", "e", "f"])],
            vec![s(&["a", "b", "c", "e"]), s(&["a", "d", "e"]), s(&["c", "e", "f"])]
        );
        assert_eq!(scopes[&s(&["a"])], vec![s(&["a"])]);
    }

    #[test]
    fn shared_parent_cliques_are_pinned() {
        let g = ChainGraph::from_labels(&[("a", "c"), ("b", "d"), ("a", "x"), ("b", "y")], &[("c", "d"), ("x", "y")], &[])
            .unwrap();
        let scopes = cg_factor_scopes(&g);
        assert!(scopes[&s(&["c", "d"])].contains(&s(&["a", "b"])));
        assert!(scopes[&s(&["x", "y"])].contains(&s(&["a", "b"])));
        let d = Domains::binary(g.vertices());
        let mut k = 0.0;
        let fa = factors_for_scopes(&scopes, &d, || {
            k += 1.0;
            k
        })
        .unwrap();
        let j: JointTable = cg_assemble_joint(&g, &d, &fa).unwrap();
        assert!((j.total() - 1.0).abs() < 1e-12);
    }
}
