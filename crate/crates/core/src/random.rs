//! Random structures and tables for testing.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chain_graph::ChainGraph;
use crate::dah::{Dah, Hyperedge};
use crate::error::Result;
use crate::factor::{Domains, JointTable};
use crate::factorization::{factors_for_scopes, FactorAssignment, ScopeMap};
use crate::scalar::Scalar;
use crate::vertex::{VertexId, VertexSet};

/// `a`, `b`, ... for up to 26 vertices, `v0`, `v1`, ... beyond.
pub fn labels(n: usize) -> Vec<VertexId> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                VertexId::from(((b'a' + i as u8) as char).to_string())
            } else {
                VertexId::from(format!("v{i}"))
            }
        })
        .collect()
}

/// Vertices in shuffled order, each tagged with a random block; blocks are visited in order.
fn blocks<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<(VertexId, usize)> {
    let mut vs = labels(n);
    vs.shuffle(rng);
    let count = rng.gen_range(1..=n.max(1));
    vs.into_iter().map(|v| (v, rng.gen_range(0..count))).collect()
}

/// Chain graph on `n` vertices: lines inside random blocks, arcs from earlier blocks to later ones.
pub fn random_chain_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p_arc: f64, p_line: f64) -> ChainGraph {
    let tagged = blocks(rng, n);
    let mut arcs = BTreeSet::new();
    let mut lines = BTreeSet::new();
    for (u, bu) in &tagged {
        for (w, bw) in &tagged {
            if bu < bw && rng.gen_bool(p_arc) {
                arcs.insert((u.clone(), w.clone()));
            } else if bu == bw && u < w && rng.gen_bool(p_line) {
                lines.insert((u.clone(), w.clone()));
            }
        }
    }
    ChainGraph::new(labels(n), arcs, lines).expect("block construction is acyclic")
}

/// Hypergraph on `n` vertices with up to `edges` distinct hyperedges. Each head lies in one
/// block and each tail in earlier blocks.
pub fn random_dah<R: Rng + ?Sized>(rng: &mut R, n: usize, edges: usize) -> Dah {
    let tagged = blocks(rng, n);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for _ in 0..edges {
        if tagged.is_empty() {
            break;
        }
        let block = tagged[rng.gen_range(0..tagged.len())].1;
        let members: Vec<&VertexId> = tagged.iter().filter(|t| t.1 == block).map(|t| &t.0).collect();
        let mut head: VertexSet = members.iter().filter(|_| rng.gen_bool(0.5)).map(|v| (*v).clone()).collect();
        if head.is_empty() {
            head.insert(members[rng.gen_range(0..members.len())].clone());
        }
        let tail: VertexSet = tagged
            .iter()
            .filter(|t| t.1 < block && rng.gen_bool(0.4))
            .map(|t| t.0.clone())
            .collect();
        let e = Hyperedge::new(tail, head).expect("tail and head come from different blocks");
        if seen.insert(e.clone()) {
            out.push(e);
        }
    }
    Dah::new(labels(n), out).expect("block construction is acyclic")
}

/// Uniform on `[low, high)`.
pub fn random_positive<T: Scalar, R: Rng + ?Sized>(rng: &mut R, low: f64, high: f64) -> T {
    T::from_f64(rng.gen_range(low..high)).expect("finite")
}

/// Factors for every scope with entries drawn from `[0.1, 1)`.
pub fn random_factors<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    scopes: &ScopeMap,
    domains: &Domains,
) -> Result<FactorAssignment<T>> {
    factors_for_scopes(scopes, domains, || random_positive(rng, 0.1, 1.0))
}

/// Strictly positive joint over `vars`.
pub fn random_joint<T: Scalar, R: Rng + ?Sized>(rng: &mut R, vars: &VertexSet, domains: &Domains) -> Result<JointTable<T>> {
    let total: usize = vars.iter().map(|v| domains.size(v)).product::<Result<usize>>()?;
    let values: Vec<T> = (0..total).map(|_| random_positive(rng, 0.05, 1.0)).collect();
    let values = std::cell::RefCell::new(values.into_iter());
    JointTable::from_unnormalized(vars, domains, |_| {
        values.borrow_mut().next().expect("one value per configuration")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{assemble_joint, factor_scopes};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_structures_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 0..8 {
            let g = random_chain_graph(&mut rng, n, 0.4, 0.5);
            assert_eq!(g.vertices().len(), n);
            let h = random_dah(&mut rng, n, 5);
            assert!(h.is_acyclic());
            assert_eq!(h.vertices().len(), n);
        }
        assert_eq!(labels(27)[26].as_str(), "v26");
    }

    #[test]
    fn random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_dah(&mut rng, 5, 4);
        let d = Domains::binary(h.vertices());
        let fa: FactorAssignment = random_factors(&mut rng, &factor_scopes(&h), &d).unwrap();
        let j = assemble_joint(&h, &d, &fa).unwrap();
        assert!((j.total() - 1.0).abs() < 1e-12);
        assert!(j.table().iter().all(|&p| p > 0.0));
        let vs = h.vertices().clone();
        let r: JointTable = random_joint(&mut rng, &vs, &d).unwrap();
        assert!((r.total() - 1.0).abs() < 1e-12);
    }
}
