//! Cosine-based bias scores for embedding spaces and executable audits of
//! their comparability and trustworthiness.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command line live in the `embias` crate.
//!
//! Modules:
//! - [`vector`]: cosine, normalized means and group association.
//! - [`space`]: embedding storage, attribute groups and target sets.
//! - [`weat`]: association differences, effect size, test statistic and
//!   permutation test.
//! - [`subspace`]: defining sets, deterministic PCA and direction
//!   correlation.
//! - [`directbias`]: Direct Bias over a direction or a subspace.
//! - [`audit`]: bias predicates, counterexample constructions, the
//!   standardized-sum lemma and randomized property probes.

#![no_std]

extern crate alloc;

pub mod audit;
pub mod directbias;
mod eigen;
mod error;
pub mod rng;
pub mod space;
pub mod subspace;
pub mod vector;
pub mod weat;

pub use error::{Error, Result};
pub use space::{AttributeGroups, EmbeddingSpace, TargetSet};
