use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Opaque vertex label. Labels compare as exact byte strings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(Arc<str>);

pub type VertexSet = BTreeSet<VertexId>;

impl VertexId {
    /// Builds a label, rejecting anything the text formats could not read back.
    pub fn new(label: &str) -> Result<Self> {
        let id = VertexId(Arc::from(label));
        id.validate()?;
        Ok(id)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if !is_label(&self.0) {
            return Err(Error::InvalidLabel(self.0.to_string()));
        }
        Ok(())
    }
}

/// Non-whitespace, printable, and free of the reserved `-`, `:`, `#`, `=`, `,` characters.
pub(crate) fn is_label(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !c.is_control() && !matches!(c, '-' | ':' | '#' | '=' | ','))
}

impl From<&str> for VertexId {
    fn from(label: &str) -> Self {
        VertexId(Arc::from(label))
    }
}

impl From<String> for VertexId {
    fn from(label: String) -> Self {
        VertexId(Arc::from(label))
    }
}

impl Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        VertexId::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Collects labels into a [`VertexSet`].
pub fn vertex_set<I, S>(labels: I) -> VertexSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels.into_iter().map(|s| VertexId::from(s.as_ref())).collect()
}

/// `{a,b,c}`
pub fn format_set(set: &VertexSet) -> String {
    let inner: Vec<&str> = set.iter().map(VertexId::as_str).collect();
    format!("{{{}}}", inner.join(","))
}

