//! Executable bias definitions and score audits.
//!
//! - [`predicates`]: individual and aggregated bias over attribute groups.
//! - [`witness`]: replayable configurations that certify a claim about a
//!   score.
//! - [`construct`]: closed-form geometries where a score attains its
//!   extremes or misreports bias.
//! - [`lemma`]: the bound on standardized partial sums behind the effect
//!   size range.
//! - [`probe`]: randomized comparability and trustworthiness probes.
//!
//! A probe that finds no violation is evidence, not proof. A witness it
//! emits is a certificate that can be rechecked from its stored vectors.

pub mod construct;
pub mod lemma;
pub mod predicates;
pub mod probe;
pub mod witness;

pub use construct::{
    construct_direct_bias_counterexample, construct_weat_extremal, construct_weat_zero_bias,
    DirectBiasCounterexample,
};
pub use lemma::{lemma_bound, lemma_check, lemma_equality_configuration, lemma_search, LemmaCheck};
pub use predicates::{aggregated_bias, individual_bias, AggregatedBias, IndividualBias};
pub use probe::{
    comparability_probe, score_extrema, trustworthiness_probe, AttributeDraw, ComparabilityReport,
    Extrema, ProbeConfig, ScoreKind, TrustworthinessReport,
};
pub use witness::{BiasWitness, Geometry, NamedScore, WitnessKind};

/// Default tolerance for "equal" and "zero" in every predicate.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
