//! Vector primitives shared by every score.
//!
//! Vectors are plain `[f64]` slices; sets of vectors are slices of
//! `Vec<f64>`. All norms are Euclidean.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

pub(crate) fn check_dim(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(())
}

/// Euclidean norm, rejecting zero and non-finite vectors.
pub fn checked_norm(v: &[f64]) -> Result<f64> {
    let n = norm(v);
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(Error::DegenerateVector)
    }
}

pub fn normalize(v: &[f64]) -> Result<Vec<f64>> {
    let n = checked_norm(v)?;
    Ok(v.iter().map(|x| x / n).collect())
}

pub fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

/// Embeds `v` into `dim` dimensions by appending zero coordinates.
/// Every dot product between padded vectors equals the original one.
pub fn zero_pad(v: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim.max(v.len())];
    out[..v.len()].copy_from_slice(v);
    out
}

/// Cosine similarity `u·v / (‖u‖‖v‖)`, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(u, v)?;
    let nu = checked_norm(u)?;
    let nv = checked_norm(v)?;
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Mean of the unit-normalized members of `set`.
///
/// The result may be the zero vector (antipodal members cancel); callers
/// that need a direction must check for it.
pub fn normalized_mean(set: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = set.first().ok_or(Error::EmptyInput("vector set"))?;
    let mut acc = vec![0.0; first.len()];
    for v in set {
        check_dim(first, v)?;
        let n = checked_norm(v)?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x / n;
        }
    }
    let count = set.len() as f64;
    acc.iter_mut().for_each(|a| *a /= count);
    Ok(acc)
}

/// Association of a target with one group: the mean cosine of `t` with
/// every member of `group`.
pub fn group_association(t: &[f64], group: &[Vec<f64>]) -> Result<f64> {
    if group.is_empty() {
        return Err(Error::EmptyInput("attribute group"));
    }
    let mut sum = 0.0;
    for a in group {
        sum += cosine(t, a)?;
    }
    Ok(sum / group.len() as f64)
}
