//! Direct Bias: mean of `|cos(w, g)|^c` over neutral words.
//!
//! A zero cosine scores 0 at every strictness, including `c = 0`.
//! The subspace variant replaces `|cos(w, g)|` with the norm of the
//! projection of `w/‖w‖` onto the subspace, which equals `|cos(w, g)|`
//! when the subspace has one component.

use alloc::vec::Vec;

use crate::space::TargetSet;
use crate::subspace::BiasSubspace;
use crate::vector::{checked_norm, cosine, dot, normalize};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum BiasAxis {
    Direction(Vec<f64>),
    Subspace(BiasSubspace),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectBiasConfig {
    strictness: f64,
    axis: BiasAxis,
}

impl DirectBiasConfig {
    /// The direction is normalized on construction.
    pub fn with_direction(strictness: f64, direction: &[f64]) -> Result<Self> {
        check_strictness(strictness)?;
        Ok(Self {
            strictness,
            axis: BiasAxis::Direction(normalize(direction)?),
        })
    }

    pub fn with_subspace(strictness: f64, subspace: BiasSubspace) -> Result<Self> {
        check_strictness(strictness)?;
        Ok(Self {
            strictness,
            axis: BiasAxis::Subspace(subspace),
        })
    }

    pub fn strictness(&self) -> f64 {
        self.strictness
    }

    pub fn axis(&self) -> &BiasAxis {
        &self.axis
    }

    /// Individual bias of one word under this configuration.
    pub fn score(&self, t: &[f64]) -> Result<f64> {
        match &self.axis {
            BiasAxis::Direction(g) => direct_bias_word(t, g, self.strictness),
            BiasAxis::Subspace(s) => direct_bias_subspace(t, s, self.strictness),
        }
    }
}

fn check_strictness(c: f64) -> Result<()> {
    if c >= 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!(
            "strictness must be finite and non-negative, got {c}"
        )))
    }
}

/// `|x|^c` with `0^c = 0` for every `c ≥ 0`.
fn strict_power(x: f64, c: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        libm::pow(x.abs(), c).min(1.0)
    }
}

pub fn direct_bias_word(t: &[f64], g: &[f64], strictness: f64) -> Result<f64> {
    check_strictness(strictness)?;
    Ok(strict_power(cosine(t, g)?, strictness))
}

pub fn direct_bias_subspace(t: &[f64], subspace: &BiasSubspace, strictness: f64) -> Result<f64> {
    check_strictness(strictness)?;
    let n = checked_norm(t)?;
    if t.len() != subspace.dim() {
        return Err(Error::DimensionMismatch {
            expected: subspace.dim(),
            found: t.len(),
        });
    }
    let proj_sq: f64 = subspace
        .components()
        .iter()
        .map(|c| {
            let p = dot(t, c) / n;
            p * p
        })
        .sum();
    Ok(strict_power(libm::sqrt(proj_sq), strictness))
}

/// Per-word scores and their mean.
pub fn direct_bias_scores(words: &TargetSet, cfg: &DirectBiasConfig) -> Result<(f64, Vec<f64>)> {
    let scores = words
        .members()
        .iter()
        .map(|w| cfg.score(w))
        .collect::<Result<Vec<_>>>()?;
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok((mean, scores))
}

pub fn direct_bias_set(words: &TargetSet, cfg: &DirectBiasConfig) -> Result<f64> {
    direct_bias_scores(words, cfg).map(|(mean, _)| mean)
}
