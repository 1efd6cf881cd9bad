//! Embedding storage and the validated sets built from it.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::vector::checked_norm;
use crate::{Error, Result};

/// Token to vector mapping with a fixed dimension.
///
/// Every stored vector has `dim` finite components and a positive norm.
/// Lookup is exact and case-sensitive.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    dim: usize,
    entries: BTreeMap<String, Vec<f64>>,
    order: Vec<String>,
}

impl EmbeddingSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "embedding dimension must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            entries: BTreeMap::new(),
            order: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        checked_norm(&vector)?;
        if self.entries.contains_key(&token) {
            return Err(Error::DuplicateToken(token));
        }
        self.order.push(token.clone());
        self.entries.insert(token, vector);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Result<&[f64]> {
        self.entries
            .get(token)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingToken(token.into()))
    }

    /// Looks up every token; a single missing token fails the whole call.
    pub fn lookup_all<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Vec<Vec<f64>>> {
        tokens
            .iter()
            .map(|t| self.get(t.as_ref()).map(<[f64]>::to_vec))
            .collect()
    }

    /// Tokens in insertion order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.order
            .iter()
            .map(move |t| (t.as_str(), self.entries[t].as_slice()))
    }
}

/// A named, nonempty sequence of target vectors with optional source tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    name: String,
    labels: Vec<String>,
    members: Vec<Vec<f64>>,
}

impl TargetSet {
    pub fn new(name: impl Into<String>, members: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..members.len()).map(|i| alloc::format!("#{i}")).collect();
        Self::with_labels(name, labels, members)
    }

    pub fn with_labels(
        name: impl Into<String>,
        labels: Vec<String>,
        members: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyInput("target set"))?;
        if labels.len() != members.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} labels for {} targets",
                labels.len(),
                members.len()
            )));
        }
        let dim = first.len();
        for m in &members {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.len(),
                });
            }
            checked_norm(m)?;
        }
        Ok(Self {
            name: name.into(),
            labels,
            members,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn members(&self) -> &[Vec<f64>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].len()
    }
}

/// `n ≥ 2` named attribute groups of identical size. Index `k` of one group
/// is the counterpart of index `k` in every other group.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeGroups {
    names: Vec<String>,
    groups: Vec<Vec<Vec<f64>>>,
}

impl AttributeGroups {
    pub fn new(names: Vec<String>, groups: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::InvalidParameter(
                "at least two attribute groups are required".into(),
            ));
        }
        if names.len() != groups.len() {
            return Err(Error::InvalidParameter(
                "one name per attribute group".into(),
            ));
        }
        let size = groups[0].len();
        if size == 0 {
            return Err(Error::EmptyInput("attribute group"));
        }
        let dim = groups[0][0].len();
        for g in &groups {
            if g.len() != size {
                return Err(Error::InvalidParameter(alloc::format!(
                    "attribute groups must have equal size ({} vs {})",
                    size,
                    g.len()
                )));
            }
            for v in g {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: v.len(),
                    });
                }
                checked_norm(v)?;
            }
        }
        Ok(Self { names, groups })
    }

    /// Two unnamed groups, labelled `A` and `B`.
    pub fn pair(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(alloc::vec!["A".into(), "B".into()], alloc::vec![a, b])
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn groups(&self) -> &[Vec<Vec<f64>>] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn group_size(&self) -> usize {
        self.groups[0].len()
    }

    pub fn dim(&self) -> usize {
        self.groups[0][0].len()
    }
}
