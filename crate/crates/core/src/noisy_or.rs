//! Noisy-OR interaction with independent inhibitors.

use crate::error::{Error, Result};
use crate::factor::{Domains, Factor};
use crate::factorization::ComplementRule;
use crate::scalar::Scalar;
use crate::vertex::VertexId;

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyOrParent<T = f64> {
    pub parent: VertexId,
    /// State in which the parent's mechanism is engaged.
    pub active: String,
    /// Probability that the mechanism fails to act on the child.
    pub inhibition: T,
}

/// A binary child whose negative state survives each engaged parent independently.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyOr<T = f64> {
    pub child: VertexId,
    pub negative: String,
    pub parents: Vec<NoisyOrParent<T>>,
}

impl<T: Scalar> NoisyOr<T> {
    fn check(&self, domains: &Domains) -> Result<()> {
        let binary = |v: &VertexId| -> Result<()> {
            if domains.size(v)? != 2 {
                return Err(Error::InvalidDomain {
                    variable: v.clone(),
                    reason: "noisy-or variables must be binary".into(),
                });
            }
            Ok(())
        };
        binary(&self.child)?;
        domains.state_index(&self.child, &self.negative)?;
        for p in &self.parents {
            binary(&p.parent)?;
            domains.state_index(&p.parent, &p.active)?;
            if p.inhibition < T::zero() || p.inhibition > T::one() || !p.inhibition.is_admissible() {
                return Err(Error::InvalidProbability(p.inhibition.to_f64()));
            }
        }
        Ok(())
    }

    /// One factor per parent over `[parent, child]`: engaged with the child negative gives `q`,
    /// engaged and positive `1 - q`, idle and negative `1`, idle and positive `0`.
    pub fn factors(&self, domains: &Domains) -> Result<Vec<Factor<T>>> {
        self.check(domains)?;
        let neg = domains.state_index(&self.child, &self.negative)?;
        self.parents
            .iter()
            .map(|p| {
                let on = domains.state_index(&p.parent, &p.active)?;
                Factor::from_fn(vec![p.parent.clone(), self.child.clone()], domains, |c| {
                    match (c[0] == on, c[1] == neg) {
                        (true, true) => p.inhibition.clone(),
                        (true, false) => T::one() - p.inhibition.clone(),
                        (false, true) => T::one(),
                        (false, false) => T::zero(),
                    }
                })
            })
            .collect()
    }

    /// Normalization rule that turns the factor product into the conditional table.
    pub fn complement_rule(&self) -> ComplementRule {
        ComplementRule {
            child: self.child.clone(),
            reference: self.negative.clone(),
        }
    }

    /// `P(child negative | engaged parents) = ∏ q_p` over the engaged parents.
    pub fn negative_probability(&self, engaged: &[&VertexId]) -> T {
        self.parents
            .iter()
            .filter(|p| engaged.contains(&&p.parent))
            .fold(T::one(), |acc, p| acc * p.inhibition.clone())
    }
}
