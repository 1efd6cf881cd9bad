//! Replayable witnesses.
//!
//! A witness stores a concrete vector configuration, the scores it produced
//! and the claim those scores establish. [`BiasWitness::recheck`]
//! recomputes everything from the stored vectors.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::audit::lemma::lemma_check;
use crate::audit::predicates::{aggregated_bias, individual_bias};
use crate::directbias::direct_bias_word;
use crate::space::{AttributeGroups, TargetSet};
use crate::subspace::{centered_samples, pca, DefiningSetFamily};
use crate::weat::{association_diff, attribute_difference_norm, effect_size, WeatInstance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// The score reports no bias while the bias predicate reports bias, or
    /// the other way round.
    TrustworthinessViolation,
    /// The score attains its attribute-independent extreme.
    ComparabilityEvidence,
    /// The standardized partial sum attains its bound.
    LemmaEquality,
    /// The score attains an extreme that depends on the attribute sets.
    Extremal,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TrustworthinessViolation => "trustworthiness-violation",
            Self::ComparabilityEvidence => "comparability-evidence",
            Self::LemmaEquality => "lemma-equality",
            Self::Extremal => "extremal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// One target scored with `s(t, A, B)`.
    WeatTarget {
        t: Vec<f64>,
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
    },
    /// Two target sets scored with the effect size.
    WeatSets {
        x: Vec<Vec<f64>>,
        y: Vec<Vec<f64>>,
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
    },
    /// Defining pairs `(a_k, c_k)` whose first principal component is the
    /// bias direction; groups are the firsts and the seconds.
    DirectBias {
        pairs: Vec<(Vec<f64>, Vec<f64>)>,
        probes: Vec<Vec<f64>>,
        strictness: f64,
    },
    Lemma {
        values: Vec<f64>,
        selection: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedScore {
    pub name: String,
    pub value: f64,
}

fn named(name: impl Into<String>, value: f64) -> NamedScore {
    NamedScore {
        name: name.into(),
        value,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasWitness {
    pub kind: WitnessKind,
    pub description: String,
    pub geometry: Geometry,
    pub scores: Vec<NamedScore>,
    pub tolerance: f64,
}

impl BiasWitness {
    /// Scores `geometry` and records the result. Fails if the claim for
    /// `kind` does not hold.
    pub fn certify(
        kind: WitnessKind,
        description: impl Into<String>,
        geometry: Geometry,
        tolerance: f64,
    ) -> Result<Self> {
        let (scores, holds) = evaluate(kind, &geometry, tolerance)?;
        if !holds {
            return Err(Error::PreconditionViolation(format!(
                "geometry does not establish a {} claim",
                kind.as_str()
            )));
        }
        Ok(Self {
            kind,
            description: description.into(),
            geometry,
            scores,
            tolerance,
        })
    }

    pub fn score(&self, name: &str) -> Option<f64> {
        self.scores.iter().find(|s| s.name == name).map(|s| s.value)
    }

    /// Recomputes the scores from the stored vectors. `true` when every
    /// score is reproduced within tolerance and the claim still holds.
    pub fn recheck(&self) -> Result<bool> {
        let (scores, holds) = evaluate(self.kind, &self.geometry, self.tolerance)?;
        let reproduced = scores.len() == self.scores.len()
            && scores.iter().zip(&self.scores).all(|(new, old)| {
                new.name == old.name && (new.value - old.value).abs() <= self.tolerance
            });
        Ok(reproduced && holds)
    }
}

fn split_pairs(pairs: &[(Vec<f64>, Vec<f64>)]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    pairs.iter().map(|(a, c)| (a.clone(), c.clone())).unzip()
}

/// Scores of a geometry and whether the claim of `kind` holds.
pub fn evaluate(
    kind: WitnessKind,
    geometry: &Geometry,
    tol: f64,
) -> Result<(Vec<NamedScore>, bool)> {
    use WitnessKind::*;
    match (kind, geometry) {
        (TrustworthinessViolation | Extremal, Geometry::WeatTarget { t, a, b }) => {
            let s = association_diff(t, a, b)?;
            let groups = AttributeGroups::pair(a.clone(), b.clone())?;
            let ind = individual_bias(t, &groups, tol)?;
            let range = attribute_difference_norm(a, b)?;
            let scores = alloc::vec![
                named("s", s),
                named("association_a", ind.associations[0]),
                named("association_b", ind.associations[1]),
                named("attribute_difference_norm", range),
            ];
            let holds = match kind {
                TrustworthinessViolation => (s.abs() <= tol) != !ind.biased,
                _ => (s.abs() - range).abs() <= tol,
            };
            Ok((scores, holds))
        }
        (TrustworthinessViolation | ComparabilityEvidence, Geometry::WeatSets { x, y, a, b }) => {
            let inst = WeatInstance::from_vectors(x.clone(), y.clone(), a.clone(), b.clone())?;
            let d = effect_size(&inst)?;
            let (xs, ys) = inst.target_scores()?;
            let mut scores = alloc::vec![named("d", d)];
            scores.extend(
                xs.iter()
                    .enumerate()
                    .map(|(i, s)| named(format!("s_x{i}"), *s)),
            );
            scores.extend(
                ys.iter()
                    .enumerate()
                    .map(|(i, s)| named(format!("s_y{i}"), *s)),
            );
            let holds = match kind {
                TrustworthinessViolation => {
                    let pooled: Vec<Vec<f64>> = x.iter().chain(y).cloned().collect();
                    let targets = TargetSet::new("X ∪ Y", pooled)?;
                    let groups = AttributeGroups::pair(a.clone(), b.clone())?;
                    let agg = aggregated_bias(&targets, &groups, tol)?;
                    scores.push(named("biased_targets", agg.witnesses.len() as f64));
                    (d.abs() <= tol) != !agg.is_biased()
                }
                _ => d.abs() >= 2.0 - tol,
            };
            Ok((scores, holds))
        }
        (
            TrustworthinessViolation,
            Geometry::DirectBias {
                pairs,
                probes,
                strictness,
            },
        ) => {
            let family = DefiningSetFamily::from_pairs(pairs.clone())?;
            let pc1 = pca(&centered_samples(&family), 1)?.first().to_vec();
            let (a, c) = split_pairs(pairs);
            let groups = AttributeGroups::pair(a, c)?;
            let mut scores: Vec<NamedScore> = pc1
                .iter()
                .enumerate()
                .map(|(i, v)| named(format!("pc1_{i}"), *v))
                .collect();
            let mut holds = false;
            for (i, p) in probes.iter().enumerate() {
                let db = direct_bias_word(p, &pc1, *strictness)?;
                let ind = individual_bias(p, &groups, tol)?;
                scores.push(named(format!("direct_bias_{i}"), db));
                scores.push(named(format!("association_a_{i}"), ind.associations[0]));
                scores.push(named(format!("association_c_{i}"), ind.associations[1]));
                holds |= (db <= tol) != !ind.biased;
            }
            Ok((scores, holds))
        }
        (LemmaEquality, Geometry::Lemma { values, selection }) => {
            let check = lemma_check(values, selection)?;
            let scores = alloc::vec![
                named("standardized_sum", check.standardized_sum),
                named("bound", check.bound),
            ];
            Ok((
                scores,
                (check.standardized_sum.abs() - check.bound).abs() <= tol,
            ))
        }
        (kind, _) => Err(Error::InvalidParameter(format!(
            "{} witnesses do not apply to this geometry",
            kind.as_str()
        ))),
    }
}
