//! Individual and aggregated bias.
//!
//! A target is biased when its associations with two groups differ by more
//! than `eps`; a set is biased when any member is, even if the differences
//! cancel on average.

use alloc::vec::Vec;

use crate::space::{AttributeGroups, TargetSet};
use crate::vector::group_association;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct IndividualBias {
    /// `s(t, A_i)` for every group, in group order.
    pub associations: Vec<f64>,
    /// `max_i s(t, A_i) − min_j s(t, A_j)`.
    pub spread: f64,
    pub biased: bool,
}

pub fn individual_bias(t: &[f64], groups: &AttributeGroups, eps: f64) -> Result<IndividualBias> {
    let associations = groups
        .groups()
        .iter()
        .map(|g| group_association(t, g))
        .collect::<Result<Vec<_>>>()?;
    let max = associations
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = associations.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    Ok(IndividualBias {
        associations,
        spread,
        biased: spread > eps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasedMember {
    pub index: usize,
    pub label: alloc::string::String,
    pub vector: Vec<f64>,
    pub bias: IndividualBias,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedBias {
    /// Every individually biased member, in set order.
    pub witnesses: Vec<BiasedMember>,
}

impl AggregatedBias {
    pub fn is_biased(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

pub fn aggregated_bias(
    targets: &TargetSet,
    groups: &AttributeGroups,
    eps: f64,
) -> Result<AggregatedBias> {
    let mut witnesses = Vec::new();
    for (index, (t, label)) in targets.members().iter().zip(targets.labels()).enumerate() {
        let bias = individual_bias(t, groups, eps)?;
        if bias.biased {
            witnesses.push(BiasedMember {
                index,
                label: label.clone(),
                vector: t.clone(),
                bias,
            });
        }
    }
    Ok(AggregatedBias { witnesses })
}
