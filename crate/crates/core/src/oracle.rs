//! Brute-force conditional independence on explicit joints.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::dah::Dah;
use crate::error::{Error, Result};
use crate::factor::JointTable;
use crate::markov::{hg_separates, local_statements, pairwise_statements, CiStatement};
use crate::scalar::Scalar;
use crate::vertex::{VertexId, VertexSet};

pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Largest joint accepted by the exhaustive queries.
pub const MAX_ORACLE_VARIABLES: usize = 7;

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidTolerance);
    }
    Ok(())
}

/// Memoized marginals of one joint.
pub struct CiOracle<'a, T: Scalar> {
    joint: &'a JointTable<T>,
    cache: RefCell<HashMap<VertexSet, std::rc::Rc<JointTable<T>>>>,
}

impl<'a, T: Scalar> CiOracle<'a, T> {
    pub fn new(joint: &'a JointTable<T>) -> Self {
        CiOracle {
            joint,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn marginal(&self, vars: &VertexSet) -> Result<std::rc::Rc<JointTable<T>>> {
        if let Some(m) = self.cache.borrow().get(vars) {
            return Ok(m.clone());
        }
        let m = std::rc::Rc::new(self.joint.marginal(vars)?);
        self.cache.borrow_mut().insert(vars.clone(), m.clone());
        Ok(m)
    }

    /// `a ⟂ b | c` up to `tol`, skipping conditioning configurations of mass at most `tol`.
    pub fn holds(&self, a: &VertexSet, b: &VertexSet, c: &VertexSet, tol: f64) -> Result<bool> {
        check_tolerance(tol)?;
        CiStatement::new(a.clone(), b.clone(), c.clone())?;
        let abc: VertexSet = a.iter().chain(b).chain(c).cloned().collect();
        let p_abc = self.marginal(&abc)?;
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        let ac: VertexSet = a.union(c).cloned().collect();
        let bc: VertexSet = b.union(c).cloned().collect();
        let (p_ac, p_bc, p_c) = (self.marginal(&ac)?, self.marginal(&bc)?, self.marginal(c)?);
        let scope = p_abc.scope();
        let positions = |sub: &JointTable<T>| -> Vec<usize> {
            sub.scope().iter().map(|v| scope.iter().position(|w| w == v).unwrap()).collect()
        };
        let (pos_ac, pos_bc, pos_c) = (positions(&p_ac), positions(&p_bc), positions(&p_c));
        let pick = |config: &[usize], pos: &[usize]| -> Vec<usize> { pos.iter().map(|&p| config[p]).collect() };
        for i in 0..p_abc.len() {
            let config = p_abc.configuration(i);
            let pc = p_c.get(&pick(&config, &pos_c)).clone();
            if pc.to_f64() <= tol || pc.is_zero() {
                continue;
            }
            let joint = p_abc.table()[i].clone() / pc.clone();
            let left = p_ac.get(&pick(&config, &pos_ac)).clone() / pc.clone();
            let right = p_bc.get(&pick(&config, &pos_bc)).clone() / pc;
            if (joint - left * right).abs().to_f64() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `a ⟂ b | c` in `j`; see [`CiOracle::holds`].
pub fn holds_ci<T: Scalar>(j: &JointTable<T>, a: &VertexSet, b: &VertexSet, c: &VertexSet, tol: f64) -> Result<bool> {
    CiOracle::new(j).holds(a, b, c, tol)
}

fn check_size<T: Scalar>(j: &JointTable<T>) -> Result<()> {
    if j.scope().len() > MAX_ORACLE_VARIABLES {
        return Err(Error::TooManyVariables {
            count: j.scope().len(),
            limit: MAX_ORACLE_VARIABLES,
        });
    }
    Ok(())
}

/// Every canonical triple of disjoint sets over `vars` with both sides nonempty.
pub fn all_triples(vars: &[VertexId]) -> Vec<CiStatement> {
    let n = vars.len() as u32;
    let mut out = Vec::new();
    for code in 0..4usize.pow(n) {
        let (mut a, mut b, mut c) = (VertexSet::new(), VertexSet::new(), VertexSet::new());
        let mut k = code;
        for v in vars {
            match k % 4 {
                1 => a.insert(v.clone()),
                2 => b.insert(v.clone()),
                3 => c.insert(v.clone()),
                _ => false,
            };
            k /= 4;
        }
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let st = CiStatement { a, b, c };
        if st.clone().canonical() == st {
            out.push(st);
        }
    }
    out.sort();
    out
}

/// All canonical statements that hold in `j`, sorted.
pub fn enumerate_ci<T: Scalar>(j: &JointTable<T>, tol: f64) -> Result<Vec<CiStatement>> {
    check_size(j)?;
    check_tolerance(tol)?;
    let oracle = CiOracle::new(j);
    let mut out = Vec::new();
    for st in all_triples(j.scope()) {
        if oracle.holds(&st.a, &st.b, &st.c, tol)? {
            out.push(st);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    Composition,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (code, name) = match self {
            Axiom::Symmetry => ("S1", "symmetry"),
            Axiom::Decomposition => ("S2", "decomposition"),
            Axiom::WeakUnion => ("S3", "weak union"),
            Axiom::Contraction => ("S4", "contraction"),
            Axiom::Intersection => ("S5", "intersection"),
            Axiom::Composition => ("S6", "composition"),
        };
        write!(f, "{code} ({name})")
    }
}

/// Premises present, conclusion absent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub premises: Vec<CiStatement>,
    pub conclusion: CiStatement,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.axiom)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, " and ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " but not {}", self.conclusion)
    }
}

fn proper_subsets(s: &VertexSet) -> Vec<VertexSet> {
    let items: Vec<&VertexId> = s.iter().collect();
    let n = items.len();
    (1..(1usize << n).saturating_sub(1))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i].clone()).collect())
        .collect()
}

fn nonempty_subsets(s: &VertexSet) -> Vec<VertexSet> {
    let mut out = proper_subsets(s);
    if !s.is_empty() {
        out.push(s.clone());
    }
    out
}

fn diff(x: &VertexSet, y: &VertexSet) -> VertexSet {
    x.difference(y).cloned().collect()
}

fn union(x: &VertexSet, y: &VertexSet) -> VertexSet {
    x.union(y).cloned().collect()
}

/// Axiom instances whose premises are in `statements` but whose conclusion is not.
///
/// Statements with a vertex outside `universe` are ignored. S5 and S6 are checked only with
/// `optional` set.
pub fn check_semigraphoid(statements: &[CiStatement], universe: &VertexSet, optional: bool) -> Vec<Violation> {
    let present: BTreeSet<CiStatement> = statements
        .iter()
        .filter(|s| s.a.iter().chain(&s.b).chain(&s.c).all(|v| universe.contains(v)))
        .cloned()
        .collect();
    let holds = |a: &VertexSet, b: &VertexSet, c: &VertexSet| {
        a.is_empty()
            || b.is_empty()
            || present.contains(
                &CiStatement {
                    a: a.clone(),
                    b: b.clone(),
                    c: c.clone(),
                }
                .canonical(),
            )
    };
    let st = |a: &VertexSet, b: &VertexSet, c: &VertexSet| CiStatement {
        a: a.clone(),
        b: b.clone(),
        c: c.clone(),
    };
    let mut out = BTreeSet::new();
    let mut report = |axiom, premises: Vec<CiStatement>, conclusion: CiStatement| {
        out.insert(Violation {
            axiom,
            premises,
            conclusion: conclusion.canonical(),
        });
    };
    for s in &present {
        let swapped = s.swapped();
        if !present.contains(&swapped) && !present.contains(&swapped.clone().canonical()) {
            report(Axiom::Symmetry, vec![s.clone()], swapped);
        }
        for (a, b) in [(&s.a, &s.b), (&s.b, &s.a)] {
            let c = &s.c;
            for part in proper_subsets(b) {
                if !holds(a, &part, c) {
                    report(Axiom::Decomposition, vec![s.clone()], st(a, &part, c));
                }
                let rest = diff(b, &part);
                let c2 = union(c, &rest);
                if !holds(a, &part, &c2) {
                    report(Axiom::WeakUnion, vec![s.clone()], st(a, &part, &c2));
                }
            }
            for d in nonempty_subsets(c) {
                let base = diff(c, &d);
                let bd = union(b, &d);
                if holds(a, &d, &base) && !holds(a, &bd, &base) {
                    report(Axiom::Contraction, vec![s.clone(), st(a, &d, &base).canonical()], st(a, &bd, &base));
                }
                if optional && holds(a, &d, &union(&base, b)) && !holds(a, &bd, &base) {
                    report(
                        Axiom::Intersection,
                        vec![s.clone(), st(a, &d, &union(&base, b)).canonical()],
                        st(a, &bd, &base),
                    );
                }
            }
        }
    }
    if optional {
        let oriented: Vec<(VertexSet, VertexSet, VertexSet)> = present
            .iter()
            .flat_map(|s| [(s.a.clone(), s.b.clone(), s.c.clone()), (s.b.clone(), s.a.clone(), s.c.clone())])
            .collect();
        for (a, b, c) in &oriented {
            for (a2, d, c2) in &oriented {
                if a2 == a && c2 == c && b < d && b.is_disjoint(d) && !holds(a, &union(b, d), c) {
                    report(
                        Axiom::Composition,
                        vec![st(a, b, c).canonical(), st(a, d, c).canonical()],
                        st(a, &union(b, d), c),
                    );
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Property {
    Global,
    Local,
    Pairwise,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Global => "global",
            Property::Local => "local",
            Property::Pairwise => "pairwise",
        })
    }
}

/// Outcome of checking a DAH's Markov statements against a joint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkovReport {
    pub global_checked: usize,
    pub local_checked: usize,
    pub pairwise_checked: usize,
    pub counterexamples: Vec<(Property, CiStatement)>,
}

impl MarkovReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl fmt::Display for MarkovReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "global statements checked: {}", self.global_checked)?;
        writeln!(f, "local statements checked: {}", self.local_checked)?;
        writeln!(f, "pairwise statements checked: {}", self.pairwise_checked)?;
        writeln!(f, "counterexamples: {}", self.counterexamples.len())?;
        for (p, s) in &self.counterexamples {
            writeln!(f, "  {p}: {s}")?;
        }
        Ok(())
    }
}

/// Checks every separation-certified statement of `h`, plus its local and pairwise statements,
/// against `j`.
pub fn verify_global_markov<T: Scalar>(h: &Dah, j: &JointTable<T>, tol: f64) -> Result<MarkovReport> {
    check_size(j)?;
    check_tolerance(tol)?;
    let scope: VertexSet = j.scope().iter().cloned().collect();
    if &scope != h.vertices() {
        return Err(Error::VertexSetMismatch);
    }
    let oracle = CiOracle::new(j);
    let mut report = MarkovReport {
        global_checked: 0,
        local_checked: 0,
        pairwise_checked: 0,
        counterexamples: Vec::new(),
    };
    for st in all_triples(j.scope()) {
        if hg_separates(h, &st.a, &st.b, &st.c)? {
            report.global_checked += 1;
            if !oracle.holds(&st.a, &st.b, &st.c, tol)? {
                report.counterexamples.push((Property::Global, st));
            }
        }
    }
    for st in local_statements(h)? {
        report.local_checked += 1;
        if !oracle.holds(&st.a, &st.b, &st.c, tol)? {
            report.counterexamples.push((Property::Local, st));
        }
    }
    for st in pairwise_statements(h)? {
        report.pairwise_checked += 1;
        if !oracle.holds(&st.a, &st.b, &st.c, tol)? {
            report.counterexamples.push((Property::Pairwise, st));
        }
    }
    Ok(report)
}
