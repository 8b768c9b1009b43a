//! Discrete domains, factor tables and joint tables.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vertex::{VertexId, VertexSet};

/// Ordered state labels per variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Domains {
    states: BTreeMap<VertexId, Vec<String>>,
}

impl Domains {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every variable gets the states `0` and `1`.
    pub fn binary<'a>(vars: impl IntoIterator<Item = &'a VertexId>) -> Self {
        let mut d = Domains::new();
        for v in vars {
            d.states.insert(v.clone(), vec!["0".into(), "1".into()]);
        }
        d
    }

    pub fn insert(&mut self, var: VertexId, states: Vec<String>) -> Result<()> {
        var.validate()?;
        if states.is_empty() {
            return Err(Error::InvalidDomain {
                variable: var,
                reason: "no states".into(),
            });
        }
        if states.iter().any(|s| s.is_empty() || s.chars().any(|c| c.is_whitespace() || c.is_control())) {
            return Err(Error::InvalidDomain {
                variable: var,
                reason: "state labels must be nonempty and free of whitespace".into(),
            });
        }
        let unique: BTreeSet<&String> = states.iter().collect();
        if unique.len() != states.len() {
            return Err(Error::InvalidDomain {
                variable: var,
                reason: "repeated state label".into(),
            });
        }
        if self.states.contains_key(&var) {
            return Err(Error::DuplicateVertex(var));
        }
        self.states.insert(var, states);
        Ok(())
    }

    pub fn states(&self, var: &VertexId) -> Result<&[String]> {
        self.states
            .get(var)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingDomain(var.clone()))
    }

    pub fn size(&self, var: &VertexId) -> Result<usize> {
        Ok(self.states(var)?.len())
    }

    pub fn state_index(&self, var: &VertexId, state: &str) -> Result<usize> {
        self.states(var)?
            .iter()
            .position(|s| s == state)
            .ok_or_else(|| Error::InvalidState {
                variable: var.clone(),
                state: state.to_string(),
            })
    }

    pub fn variables(&self) -> impl Iterator<Item = &VertexId> {
        self.states.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Vec<String>)> {
        self.states.iter()
    }

    pub fn check_covers(&self, vars: &VertexSet) -> Result<()> {
        for v in vars {
            self.states(v)?;
        }
        Ok(())
    }
}

/// Row-major indexing over an ordered list of variables, last variable fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout {
    pub vars: Vec<VertexId>,
    pub sizes: Vec<usize>,
    pub strides: Vec<usize>,
    pub len: usize,
}

impl Layout {
    pub fn new(vars: Vec<VertexId>, domains: &Domains) -> Result<Self> {
        let sizes = vars.iter().map(|v| domains.size(v)).collect::<Result<Vec<_>>>()?;
        Ok(Layout::from_sizes(vars, sizes))
    }

    pub fn from_sizes(vars: Vec<VertexId>, sizes: Vec<usize>) -> Self {
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        let len = sizes.iter().product();
        Layout {
            vars,
            sizes,
            strides,
            len,
        }
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut config = vec![0; self.sizes.len()];
        for i in 0..self.sizes.len() {
            config[i] = idx / self.strides[i];
            idx %= self.strides[i];
        }
        config
    }

    pub fn encode(&self, config: &[usize]) -> usize {
        config.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Positions of `sub` inside this layout.
    pub fn positions(&self, sub: &[VertexId]) -> Vec<usize> {
        sub.iter()
            .map(|v| self.vars.iter().position(|w| w == v).expect("sub-scope variable"))
            .collect()
    }

    /// Index into `sub`'s layout of the restriction of `config`.
    pub fn project(config: &[usize], positions: &[usize], sub: &Layout) -> usize {
        positions
            .iter()
            .zip(&sub.strides)
            .map(|(&p, s)| config[p] * s)
            .sum()
    }
}

/// Non-negative table over an ordered scope.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T = f64> {
    layout: Layout,
    table: Vec<T>,
}

impl<T: Scalar> Factor<T> {
    pub fn new(scope: Vec<VertexId>, table: Vec<T>, domains: &Domains) -> Result<Self> {
        let unique: BTreeSet<&VertexId> = scope.iter().collect();
        if unique.len() != scope.len() {
            return Err(Error::InvalidFactor {
                scope,
                reason: "repeated variable".into(),
            });
        }
        let layout = Layout::new(scope.clone(), domains)?;
        if table.len() != layout.len {
            return Err(Error::InvalidFactor {
                scope,
                reason: format!("expected {} entries, found {}", layout.len, table.len()),
            });
        }
        if let Some(bad) = table.iter().find(|x| !x.is_admissible()) {
            return Err(Error::InvalidFactor {
                scope,
                reason: format!("entry {bad} is negative or not finite"),
            });
        }
        Ok(Factor { layout, table })
    }

    /// Table filled from a function of the configuration (state indices in scope order).
    pub fn from_fn(scope: Vec<VertexId>, domains: &Domains, f: impl Fn(&[usize]) -> T) -> Result<Self> {
        let layout = Layout::new(scope.clone(), domains)?;
        let table = (0..layout.len).map(|i| f(&layout.decode(i))).collect();
        Factor::new(scope, table, domains)
    }

    pub fn ones(scope: Vec<VertexId>, domains: &Domains) -> Result<Self> {
        Factor::from_fn(scope, domains, |_| T::one())
    }

    /// One at `state`, zero elsewhere.
    pub fn indicator(var: VertexId, state: usize, domains: &Domains) -> Result<Self> {
        Factor::from_fn(vec![var], domains, |c| if c[0] == state { T::one() } else { T::zero() })
    }

    pub fn scope(&self) -> &[VertexId] {
        &self.layout.vars
    }

    pub fn scope_set(&self) -> VertexSet {
        self.layout.vars.iter().cloned().collect()
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Entry at a configuration given in scope order.
    pub fn value(&self, config: &[usize]) -> &T {
        &self.table[self.layout.encode(config)]
    }

    /// Entry at a configuration given by state labels.
    pub fn value_of(&self, states: &[(&str, &str)], domains: &Domains) -> Result<&T> {
        let config = self.config_from_labels(states, domains)?;
        Ok(self.value(&config))
    }

    fn config_from_labels(&self, states: &[(&str, &str)], domains: &Domains) -> Result<Vec<usize>> {
        self.layout
            .vars
            .iter()
            .map(|v| {
                let (_, s) = states
                    .iter()
                    .find(|(name, _)| *name == v.as_str())
                    .ok_or_else(|| Error::MissingDomain(v.clone()))?;
                domains.state_index(v, s)
            })
            .collect()
    }

    /// Fixes the variables in `values` and drops them from the scope.
    pub fn clamp(&self, values: &BTreeMap<VertexId, usize>) -> Factor<T> {
        let keep: Vec<usize> = (0..self.layout.vars.len())
            .filter(|&i| !values.contains_key(&self.layout.vars[i]))
            .collect();
        let sub = Layout::from_sizes(
            keep.iter().map(|&i| self.layout.vars[i].clone()).collect(),
            keep.iter().map(|&i| self.layout.sizes[i]).collect(),
        );
        let mut full = vec![0; self.layout.vars.len()];
        for (i, v) in self.layout.vars.iter().enumerate() {
            if let Some(&s) = values.get(v) {
                full[i] = s;
            }
        }
        let table = (0..sub.len)
            .map(|j| {
                let c = sub.decode(j);
                for (k, &i) in keep.iter().enumerate() {
                    full[i] = c[k];
                }
                self.table[self.layout.encode(&full)].clone()
            })
            .collect();
        Factor { layout: sub, table }
    }

    /// Product with another factor over the union of scopes, `self`'s variables first.
    pub fn multiply(&self, other: &Factor<T>) -> Factor<T> {
        let mut vars = self.layout.vars.clone();
        let mut sizes = self.layout.sizes.clone();
        for (v, &s) in other.layout.vars.iter().zip(&other.layout.sizes) {
            if !vars.contains(v) {
                vars.push(v.clone());
                sizes.push(s);
            }
        }
        let layout = Layout::from_sizes(vars, sizes);
        let pa = layout.positions(&self.layout.vars);
        let pb = layout.positions(&other.layout.vars);
        let table = (0..layout.len)
            .map(|i| {
                let c = layout.decode(i);
                let x = &self.table[Layout::project(&c, &pa, &self.layout)];
                let y = &other.table[Layout::project(&c, &pb, &other.layout)];
                x.clone() * y.clone()
            })
            .collect();
        Factor { layout, table }
    }

    /// The same function over a larger scope, in the given order.
    pub fn extend(&self, scope: Vec<VertexId>, domains: &Domains) -> Result<Factor<T>> {
        if let Some(v) = self.layout.vars.iter().find(|v| !scope.contains(v)) {
            return Err(Error::InvalidFactor {
                scope,
                reason: format!("does not contain `{v}`"),
            });
        }
        let ones = Factor::ones(scope, domains)?;
        let product = ones.multiply(self);
        Ok(product)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Factor<U> {
        Factor {
            layout: self.layout.clone(),
            table: self.table.iter().map(f).collect(),
        }
    }
}

/// A distribution over every variable of a structure, sorted by label.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable<T = f64> {
    layout: Layout,
    table: Vec<T>,
}

impl<T: Scalar> JointTable<T> {
    pub(crate) fn from_parts(layout: Layout, table: Vec<T>) -> Self {
        JointTable { layout, table }
    }

    /// Normalizes a non-negative table over `vars` (sorted internally).
    pub fn from_unnormalized(vars: &VertexSet, domains: &Domains, f: impl Fn(&[usize]) -> T) -> Result<Self> {
        let layout = Layout::new(vars.iter().cloned().collect(), domains)?;
        let raw: Vec<T> = (0..layout.len).map(|i| f(&layout.decode(i))).collect();
        let total = raw.iter().fold(T::zero(), |a, b| a + b.clone());
        if total.is_zero() {
            return Err(Error::ZeroNormalizer {
                component: vars.clone(),
                configuration: Vec::new(),
            });
        }
        Ok(JointTable {
            layout,
            table: raw.into_iter().map(|x| x / total.clone()).collect(),
        })
    }

    pub fn scope(&self) -> &[VertexId] {
        &self.layout.vars
    }

    pub fn sizes(&self) -> &[usize] {
        &self.layout.sizes
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// State indices of entry `idx`, in scope order.
    pub fn configuration(&self, idx: usize) -> Vec<usize> {
        self.layout.decode(idx)
    }

    pub fn get(&self, config: &[usize]) -> &T {
        &self.table[self.layout.encode(config)]
    }

    /// Probability of a full configuration given by labels.
    pub fn probability(&self, states: &[(&str, &str)], domains: &Domains) -> Result<&T> {
        let config: Vec<usize> = self
            .layout
            .vars
            .iter()
            .map(|v| {
                let (_, s) = states
                    .iter()
                    .find(|(name, _)| *name == v.as_str())
                    .ok_or_else(|| Error::MissingDomain(v.clone()))?;
                domains.state_index(v, s)
            })
            .collect::<Result<_>>()?;
        Ok(self.get(&config))
    }

    pub fn total(&self) -> T {
        self.table.iter().fold(T::zero(), |a, b| a + b.clone())
    }

    /// Marginal over `vars`, in sorted order.
    pub fn marginal(&self, vars: &VertexSet) -> Result<JointTable<T>> {
        let sub_vars: Vec<VertexId> = vars.iter().cloned().collect();
        for v in &sub_vars {
            if !self.layout.vars.contains(v) {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        let pos = self.layout.positions(&sub_vars);
        let sizes = pos.iter().map(|&p| self.layout.sizes[p]).collect();
        let sub = Layout::from_sizes(sub_vars, sizes);
        let mut table = vec![T::zero(); sub.len];
        for (i, x) in self.table.iter().enumerate() {
            let c = self.layout.decode(i);
            let j = Layout::project(&c, &pos, &sub);
            table[j] = table[j].clone() + x.clone();
        }
        Ok(JointTable { layout: sub, table })
    }

    /// Product with a distribution over disjoint variables.
    pub fn independent_product(&self, other: &JointTable<T>) -> Result<JointTable<T>> {
        let mut pairs: Vec<(VertexId, usize)> = self
            .layout
            .vars
            .iter()
            .cloned()
            .zip(self.layout.sizes.iter().copied())
            .collect();
        for (v, s) in other.layout.vars.iter().zip(&other.layout.sizes) {
            if self.layout.vars.contains(v) {
                return Err(Error::OverlappingSets);
            }
            pairs.push((v.clone(), *s));
        }
        pairs.sort();
        let layout = Layout::from_sizes(
            pairs.iter().map(|p| p.0.clone()).collect(),
            pairs.iter().map(|p| p.1).collect(),
        );
        let pa = layout.positions(&self.layout.vars);
        let pb = layout.positions(&other.layout.vars);
        let table = (0..layout.len)
            .map(|i| {
                let c = layout.decode(i);
                self.table[Layout::project(&c, &pa, &self.layout)].clone()
                    * other.table[Layout::project(&c, &pb, &other.layout)].clone()
            })
            .collect();
        Ok(JointTable { layout, table })
    }

    /// Largest entrywise absolute difference; `None` when scopes differ.
    pub fn max_abs_diff(&self, other: &JointTable<T>) -> Option<f64> {
        if self.layout != other.layout {
            return None;
        }
        Some(
            self.table
                .iter()
                .zip(&other.table)
                .map(|(x, y)| (x.clone() - y.clone()).abs().to_f64())
                .fold(0.0, f64::max),
        )
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> JointTable<U> {
        JointTable {
            layout: self.layout.clone(),
            table: self.table.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> JointTable<f64> {
        self.map(|x| x.to_f64())
    }
}
