//! Text formats for hypergraphs, chain graphs and interventions, and JSON for domains and factors.
//!
//! Graph files are line oriented. `#` starts a comment.
//!
//! ```text
//! vertices: a b c d
//! edge: a b -> c      # hyperedge, tail before the arrow
//! edge: -> c d        # empty tail
//! arc: a -> b         # chain graph arc
//! line: c - d         # chain graph line
//! do: c=0 d=1         # intervention
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain_graph::ChainGraph;
use crate::dah::{Dah, Hyperedge};
use crate::error::{Error, Result};
use crate::factor::{Domains, Factor, JointTable};
use crate::factorization::{ComplementRule, FactorAssignment};
use crate::intervention::InterventionSpec;
use crate::scalar::Scalar;
use crate::vertex::{VertexId, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Arrow,
    Dash,
    Colon,
    Eq,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn lex(line_no: usize, line: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Token { tok: Tok::Arrow, column });
                i += 2;
            }
            '-' => {
                out.push(Token { tok: Tok::Dash, column });
                i += 1;
            }
            ':' => {
                out.push(Token { tok: Tok::Colon, column });
                i += 1;
            }
            '=' => {
                out.push(Token { tok: Tok::Eq, column });
                i += 1;
            }
            ',' => return Err(Error::parse(line_no, column, "unexpected `,`")),
            c if c.is_control() => return Err(Error::parse(line_no, column, "control character")),
            _ => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !chars[i].is_control()
                    && !matches!(chars[i], '#' | '-' | ':' | '=' | ',')
                {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    column,
                });
            }
        }
    }
    Ok(out)
}

struct Line {
    number: usize,
    keyword: String,
    keyword_column: usize,
    rest: Vec<Token>,
    end: usize,
}

fn lines(text: &str) -> Result<Vec<Line>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let tokens = lex(number, raw)?;
        if tokens.is_empty() {
            continue;
        }
        let end = raw.split('#').next().unwrap_or("").trim_end().chars().count() + 1;
        let keyword = match &tokens[0].tok {
            Tok::Word(w) => w.clone(),
            _ => return Err(Error::parse(number, tokens[0].column, "expected a keyword")),
        };
        match tokens.get(1) {
            Some(Token { tok: Tok::Colon, .. }) => {}
            Some(t) => return Err(Error::parse(number, t.column, "expected `:` after keyword")),
            None => return Err(Error::parse(number, end, "expected `:` after keyword")),
        }
        out.push(Line {
            number,
            keyword,
            keyword_column: tokens[0].column,
            rest: tokens[2..].to_vec(),
            end,
        });
    }
    Ok(out)
}

fn label(line: usize, t: &Token) -> Result<VertexId> {
    match &t.tok {
        Tok::Word(w) => VertexId::new(w).map_err(|e| Error::parse(line, t.column, e.to_string())),
        _ => Err(Error::parse(line, t.column, "expected a vertex label")),
    }
}

fn labels(line: usize, toks: &[Token]) -> Result<Vec<VertexId>> {
    toks.iter().map(|t| label(line, t)).collect()
}

fn label_set(line: usize, toks: &[Token]) -> Result<VertexSet> {
    let mut out = VertexSet::new();
    for t in toks {
        let v = label(line, t)?;
        if !out.insert(v.clone()) {
            return Err(Error::parse(line, t.column, format!("`{v}` listed twice")));
        }
    }
    Ok(out)
}

fn unknown_keyword(l: &Line, what: &str) -> Error {
    Error::parse(l.number, l.keyword_column, format!("unknown keyword `{}` in {what}", l.keyword))
}

fn declare(vertices: &mut Vec<VertexId>, seen: &mut VertexSet, l: &Line) -> Result<()> {
    for v in labels(l.number, &l.rest)? {
        if !seen.insert(v.clone()) {
            return Err(Error::DuplicateVertex(v).at_line(l.number));
        }
        vertices.push(v);
    }
    Ok(())
}

/// Reads a hypergraph. Vertices mentioned only in edges are added.
pub fn parse_dah(text: &str) -> Result<Dah> {
    let (mut declared, mut seen) = (Vec::new(), VertexSet::new());
    let mut edges = Vec::new();
    let mut edge_lines = BTreeMap::new();
    for l in lines(text)? {
        match l.keyword.as_str() {
            "vertices" => declare(&mut declared, &mut seen, &l)?,
            "edge" => {
                let arrows: Vec<usize> = (0..l.rest.len()).filter(|&i| l.rest[i].tok == Tok::Arrow).collect();
                let split = match arrows.as_slice() {
                    [i] => *i,
                    [] => return Err(Error::parse(l.number, l.end, "expected `->` in edge")),
                    [_, j, ..] => return Err(Error::parse(l.number, l.rest[*j].column, "second `->` in edge")),
                };
                let tail = label_set(l.number, &l.rest[..split])?;
                let head = label_set(l.number, &l.rest[split + 1..])?;
                let e = Hyperedge::new(tail, head).map_err(|e| e.at_line(l.number))?;
                if let Some(first) = edge_lines.insert(e.clone(), l.number) {
                    return Err(Error::DuplicateEdge(format!("{e} (first on line {first})")).at_line(l.number));
                }
                edges.push(e);
            }
            _ => return Err(unknown_keyword(&l, "a hypergraph")),
        }
    }
    let mut vertices: VertexSet = declared.into_iter().collect();
    vertices.extend(edges.iter().flat_map(|e| e.vertices()));
    Dah::new(vertices, edges)
}

/// Reads a chain graph. Vertices mentioned only in edges are added.
pub fn parse_chain_graph(text: &str) -> Result<ChainGraph> {
    let (mut declared, mut seen) = (Vec::new(), VertexSet::new());
    let mut arcs = BTreeSet::new();
    let mut undirected = BTreeSet::new();
    let mut pairs: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for l in lines(text)? {
        let (u, w, directed) = match l.keyword.as_str() {
            "vertices" => {
                declare(&mut declared, &mut seen, &l)?;
                continue;
            }
            "arc" | "line" => {
                let (joint, name) = if l.keyword == "arc" { (Tok::Arrow, "`->`") } else { (Tok::Dash, "`-`") };
                match l.rest.as_slice() {
                    [a, j, b] if j.tok == joint => (label(l.number, a)?, label(l.number, b)?, l.keyword == "arc"),
                    [_, j, ..] if j.tok != joint => {
                        return Err(Error::parse(l.number, j.column, format!("expected {name}")))
                    }
                    [_, _] | [_] | [] => {
                        return Err(Error::parse(l.number, l.end, "expected two endpoints"))
                    }
                    [.., extra] => return Err(Error::parse(l.number, extra.column, "unexpected token")),
                }
            }
            _ => return Err(unknown_keyword(&l, "a chain graph")),
        };
        if u == w {
            return Err(Error::SelfLoop(u).at_line(l.number));
        }
        let key = if u <= w { (u.clone(), w.clone()) } else { (w.clone(), u.clone()) };
        if pairs.insert(key.clone(), l.number).is_some() {
            return Err(Error::ConflictingEdge(key.0, key.1).at_line(l.number));
        }
        if directed {
            arcs.insert((u, w));
        } else {
            undirected.insert(key);
        }
    }
    let mut vertices: VertexSet = declared.into_iter().collect();
    for (u, w) in arcs.iter().chain(&undirected) {
        vertices.insert(u.clone());
        vertices.insert(w.clone());
    }
    ChainGraph::new(vertices, arcs, undirected)
}

/// Reads `do: var=state ...` lines.
pub fn parse_intervention(text: &str) -> Result<InterventionSpec> {
    let mut spec = InterventionSpec::new();
    for l in lines(text)? {
        if l.keyword != "do" {
            return Err(unknown_keyword(&l, "an intervention"));
        }
        let mut rest = l.rest.as_slice();
        while !rest.is_empty() {
            match rest {
                [v, Token { tok: Tok::Eq, .. }, Token { tok: Tok::Word(s), .. }, tail @ ..] => {
                    let v = label(l.number, v)?;
                    if spec.values.insert(v.clone(), s.clone()).is_some() {
                        return Err(Error::parse(l.number, rest[0].column, format!("`{v}` forced twice")));
                    }
                    rest = tail;
                }
                [t, ..] => return Err(Error::parse(l.number, t.column, "expected `variable=state`")),
                [] => unreachable!(),
            }
        }
    }
    Ok(spec)
}

fn join(vs: impl IntoIterator<Item = impl AsRef<str>>) -> String {
    vs.into_iter().map(|v| v.as_ref().to_string()).collect::<Vec<_>>().join(" ")
}

fn vertices_line(out: &mut String, vs: &VertexSet) {
    if vs.is_empty() {
        out.push_str("vertices:\n");
    } else {
        let _ = writeln!(out, "vertices: {}", join(vs.iter().map(VertexId::as_str)));
    }
}

fn side(s: &VertexSet) -> String {
    join(s.iter().map(VertexId::as_str))
}

/// Canonical text: sorted vertices, edges by head then tail.
pub fn print_dah(h: &Dah) -> String {
    let mut out = String::new();
    vertices_line(&mut out, h.vertices());
    for e in h.sorted_edges() {
        let line = match (e.tail().is_empty(), e.head().is_empty()) {
            (true, _) => format!("edge: -> {}", side(e.head())),
            (_, true) => format!("edge: {} ->", side(e.tail())),
            _ => format!("edge: {} -> {}", side(e.tail()), side(e.head())),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Canonical text: sorted vertices, then sorted arcs, then sorted lines.
pub fn print_chain_graph(g: &ChainGraph) -> String {
    let mut out = String::new();
    vertices_line(&mut out, g.vertices());
    for (u, w) in g.directed() {
        let _ = writeln!(out, "arc: {u} -> {w}");
    }
    for (u, w) in g.undirected() {
        let _ = writeln!(out, "line: {u} - {w}");
    }
    out
}

pub fn print_intervention(spec: &InterventionSpec) -> String {
    if spec.values.is_empty() {
        return String::new();
    }
    let pairs: Vec<String> = spec.values.iter().map(|(v, s)| format!("{v}={s}")).collect();
    format!("do: {}\n", pairs.join(" "))
}

/// One line per configuration, states in scope order, then the probability.
pub fn print_joint<T: Scalar>(j: &JointTable<T>, domains: &Domains) -> Result<String> {
    let mut out = format!("joint: {}\n", join(j.scope().iter().map(VertexId::as_str)));
    for i in 0..j.len() {
        let config = j.configuration(i);
        let states = j
            .scope()
            .iter()
            .zip(&config)
            .map(|(v, &k)| Ok(domains.states(v)?[k].clone()))
            .collect::<Result<Vec<_>>>()?;
        let _ = writeln!(out, "{} {}", join(states), j.table()[i]);
    }
    Ok(out)
}

/// A factor table as read from JSON, before it is checked against domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorEntry {
    pub scope: Vec<VertexId>,
    pub table: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<VertexSet>,
}

/// `{"domains": {...}, "factors": [...], "complement": [...]}`; any part may be absent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactorDocument {
    pub domains: Option<Domains>,
    pub factors: Vec<FactorEntry>,
    pub complement: Vec<ComplementRule>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domains: Option<BTreeMap<VertexId, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<FactorEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    complement: Vec<ComplementRule>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(e.line(), e.column(), e.to_string())
}

impl FactorDocument {
    /// Factors checked against `domains`, pinned to their component when one is given.
    pub fn assignment<T: Scalar>(&self, domains: &Domains) -> Result<FactorAssignment<T>> {
        let mut fa = FactorAssignment::default();
        for entry in &self.factors {
            let table = entry
                .table
                .iter()
                .map(|&x| T::from_f64(x).ok_or(Error::InvalidProbability(x)))
                .collect::<Result<Vec<T>>>()?;
            let f = Factor::new(entry.scope.clone(), table, domains)?;
            match &entry.component {
                Some(c) => fa.push_for(c.clone(), f),
                None => fa.push(f),
            }
        }
        Ok(fa)
    }

    /// Document holding `fa`, with entries in their stored order.
    pub fn from_assignment<T: Scalar>(domains: Option<&Domains>, fa: &FactorAssignment<T>) -> Self {
        FactorDocument {
            domains: domains.cloned(),
            factors: fa
                .entries()
                .iter()
                .map(|(c, f)| FactorEntry {
                    scope: f.scope().to_vec(),
                    table: f.table().iter().map(Scalar::to_f64).collect(),
                    component: c.clone(),
                })
                .collect(),
            complement: Vec::new(),
        }
    }
}

pub fn parse_factor_document(text: &str) -> Result<FactorDocument> {
    let raw: RawDocument = serde_json::from_str(text).map_err(json_error)?;
    let domains = match raw.domains {
        Some(map) => {
            let mut d = Domains::new();
            for (v, states) in map {
                d.insert(v, states)?;
            }
            Some(d)
        }
        None => None,
    };
    Ok(FactorDocument {
        domains,
        factors: raw.factors.unwrap_or_default(),
        complement: raw.complement,
    })
}

/// Domains from a JSON document with a `domains` object.
pub fn parse_domains(text: &str) -> Result<Domains> {
    parse_factor_document(text)?
        .domains
        .ok_or_else(|| Error::parse(1, 1, "missing `domains` object"))
}

pub fn print_factor_document(doc: &FactorDocument) -> String {
    let raw = RawDocument {
        domains: doc
            .domains
            .as_ref()
            .map(|d| d.iter().map(|(v, s)| (v.clone(), s.clone())).collect()),
        factors: if doc.factors.is_empty() && doc.domains.is_some() {
            None
        } else {
            Some(doc.factors.clone())
        },
        complement: doc.complement.clone(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("documents serialize");
    s.push('\n');
    s
}

/// Any document the tools read or write.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Dah(Dah),
    ChainGraph(ChainGraph),
    Factors(FactorDocument),
    Intervention(InterventionSpec),
    /// Free text, kept verbatim after a `report:` line.
    Report(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    Dah,
    ChainGraph,
    Factors,
    Intervention,
    Report,
}

/// Guesses the kind from content: JSON is a factor document, otherwise the keywords decide.
/// A file with only `vertices:` lines reads as a hypergraph.
pub fn detect_kind(text: &str) -> DocumentKind {
    let body = text.trim_start();
    if body.starts_with('{') {
        return DocumentKind::Factors;
    }
    if body.starts_with("report:") {
        return DocumentKind::Report;
    }
    for raw in text.lines() {
        let content = raw.split('#').next().unwrap_or("").trim_start();
        let keyword = content.split(|c: char| c == ':' || c.is_whitespace()).next().unwrap_or("");
        match keyword {
            "arc" | "line" => return DocumentKind::ChainGraph,
            "edge" => return DocumentKind::Dah,
            "do" => return DocumentKind::Intervention,
            _ => {}
        }
    }
    DocumentKind::Dah
}

pub fn parse_document_as(text: &str, kind: DocumentKind) -> Result<Document> {
    Ok(match kind {
        DocumentKind::Dah => Document::Dah(parse_dah(text)?),
        DocumentKind::ChainGraph => Document::ChainGraph(parse_chain_graph(text)?),
        DocumentKind::Factors => Document::Factors(parse_factor_document(text)?),
        DocumentKind::Intervention => Document::Intervention(parse_intervention(text)?),
        DocumentKind::Report => {
            let body = text.trim_start().strip_prefix("report:").unwrap_or(text);
            Document::Report(body.strip_prefix('\n').unwrap_or(body).to_string())
        }
    })
}

pub fn parse_document(text: &str) -> Result<Document> {
    parse_document_as(text, detect_kind(text))
}

pub fn print_canonical(doc: &Document) -> String {
    match doc {
        Document::Dah(h) => print_dah(h),
        Document::ChainGraph(g) => print_chain_graph(g),
        Document::Factors(f) => print_factor_document(f),
        Document::Intervention(s) => print_intervention(s),
        Document::Report(body) => format!("report:\n{body}"),
    }
}
