//! Bayesian hypergraphs: directed acyclic hypergraphs, LWF chain graphs, separation,
//! discrete factorization and intervention.

pub mod chain_graph;
pub mod dah;
pub mod error;
pub mod factor;
pub mod factorization;
pub mod format;
pub mod intervention;
pub mod markov;
mod mixed;
pub mod noisy_or;
pub mod oracle;
pub mod projection;
pub mod random;
pub mod scalar;
pub mod undirected;
pub mod vertex;

pub use chain_graph::{minimal_complexes, ChainGraph, Complex};
pub use dah::{CanonicalDag, ComponentPartition, Dah, Hyperedge, Relations};
pub use error::{Error, Result};
pub use factor::{Domains, Factor, JointTable};
pub use factorization::{
    assemble_joint, assemble_joint_with, cg_assemble_joint, cg_factor_scopes, factor_scopes, factors_for_scopes, h_star,
    maximal_edges, ComplementRule, FactorAssignment, ScopeMap,
};
pub use format::{
    parse_chain_graph, parse_dah, parse_document, parse_factor_document, parse_intervention, print_canonical,
    print_chain_graph, print_dah, Document, DocumentKind, FactorDocument,
};
pub use intervention::{
    cg_delete, cg_intervened_joint, cg_redirect, dah_normalize, dah_redirect, factorization_equivalent_cg,
    factorization_equivalent_dah, intervened_joint, intervened_joint_with, transfer_factors, InterventionSpec,
};
pub use markov::{cg_global_separates, hg_separates, local_statements, markov_equivalent, pairwise_statements, CiStatement};
pub use noisy_or::{NoisyOr, NoisyOrParent};
pub use oracle::{
    check_semigraphoid, enumerate_ci, holds_ci, verify_global_markov, Axiom, CiOracle, MarkovReport, Violation,
    DEFAULT_TOLERANCE,
};
pub use projection::{hypermoralize, is_lwf_dah, shadow};
pub use scalar::{ratio, Scalar};
pub use undirected::UndirectedGraph;
pub use vertex::{vertex_set, VertexId, VertexSet};

pub use num_rational::BigRational;

pub type ExactFactor = Factor<BigRational>;
pub type ExactJoint = JointTable<BigRational>;
pub type ExactAssignment = FactorAssignment<BigRational>;
pub type Factor32 = Factor<f32>;
pub type Joint32 = JointTable<f32>;
