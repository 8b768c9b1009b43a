use std::fmt;

use crate::vertex::{format_set, VertexId, VertexSet};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// How two consecutive vertices of a cycle witness are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    Directed,
    Undirected,
}

/// A partially directed cycle `v0 ? v1 ? ... ? v0`, one link per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub vertices: Vec<VertexId>,
    pub links: Vec<Link>,
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            write!(f, "{v}")?;
            match self.links.get(i) {
                Some(Link::Directed) => write!(f, " -> ")?,
                Some(Link::Undirected) => write!(f, " - ")?,
                None => {}
            }
        }
        if let Some(first) = self.vertices.first() {
            write!(f, "{first}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty vertex label")]
    EmptyLabel,
    #[error("vertex label `{0}` contains whitespace or a reserved character")]
    InvalidLabel(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(VertexId),
    #[error("tail and head overlap in {}", format_set(.0))]
    TailHeadOverlap(VertexSet),
    #[error("hyperedge has empty tail and empty head")]
    EmptyEdge,
    #[error("duplicate hyperedge {0}")]
    DuplicateEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),
    #[error("partially directed cycle: {0}")]
    CycleDetected(CycleWitness),
    #[error("self-loop at `{0}`")]
    SelfLoop(VertexId),
    #[error("pair `{0}`, `{1}` is joined by more than one kind of edge")]
    ConflictingEdge(VertexId, VertexId),
    #[error("query sets are not pairwise disjoint")]
    OverlappingSets,
    #[error("structures are defined on different vertex sets")]
    VertexSetMismatch,
    #[error("chain component {} has {size} vertices; complex search is limited to {limit}", format_set(.component))]
    ComplexSearchTooLarge {
        component: VertexSet,
        size: usize,
        limit: usize,
    },
    #[error("{} is not a chain component", format_set(.0))]
    NotAComponent(VertexSet),
    #[error("zero normalizer for component {} at parent configuration {}", format_set(.component), format_config(.configuration))]
    ZeroNormalizer {
        component: VertexSet,
        configuration: Vec<(VertexId, String)>,
    },
    #[error("factor scopes do not match the structure (missing: {}; unexpected: {})", format_scopes(.missing), format_scopes(.extra))]
    ScopeMismatch {
        missing: Vec<VertexSet>,
        extra: Vec<VertexSet>,
    },
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("state `{state}` is not in the domain of `{variable}`")]
    InvalidState { variable: VertexId, state: String },
    #[error("no domain declared for `{0}`")]
    MissingDomain(VertexId),
    #[error("invalid domain for `{variable}`: {reason}")]
    InvalidDomain { variable: VertexId, reason: String },
    #[error("invalid factor over {scope:?}: {reason}")]
    InvalidFactor { scope: Vec<VertexId>, reason: String },
    #[error("{count} variables exceed the limit of {limit}")]
    TooManyVariables { count: usize, limit: usize },
    #[error("negative or NaN tolerance")]
    InvalidTolerance,
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}: {source}")]
    AtLine { line: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            e @ (Error::Parse { .. } | Error::AtLine { .. }) => e,
            e => Error::AtLine {
                line,
                source: Box::new(e),
            },
        }
    }

    /// True for lexical and grammatical problems in an input document, as opposed to
    /// structural problems with what the document describes.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }

    /// The error with any line annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            e => e,
        }
    }
}

fn format_config(config: &[(VertexId, String)]) -> String {
    if config.is_empty() {
        return "(none)".to_string();
    }
    config
        .iter()
        .map(|(v, s)| format!("{v}={s}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn format_scopes(scopes: &[VertexSet]) -> String {
    if scopes.is_empty() {
        return "none".to_string();
    }
    scopes.iter().map(format_set).collect::<Vec<_>>().join(" ")
}
